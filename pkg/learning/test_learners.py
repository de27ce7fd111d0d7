"""
Learners checked step by step against a naive dense interpreter written
straight from the update rules. Sums in the interpreter are exactly rounded
(math.fsum) like the library, so traces and weights match exactly.
"""
import math
from unittest.mock import patch

import numpy as np
from django.test import SimpleTestCase

from core.exceptions import ConfigurationError, OracleBudgetExhausted
from datasets.stream import shuffle_stream
from datasets.synthetic import synth_clustered

from .learners import LearnerKind, build_learner
from .model import HyperParams, WeightMatrix
from .oracle import LabelOracle
from .sparsevec import SparseVector


def sgn(p):
    return 1 if p >= 0 else -1


def fdot(a, b):
    return math.fsum(u * v for u, v in zip(a, b))


def reweight(row, losses, C):
    lam = math.fsum(losses)
    if lam <= 0.0:
        return list(row)
    scaled = [t * math.exp(-C * loss / lam) for t, loss in zip(row, losses)]
    total = math.fsum(scaled)
    return [s / total for s in scaled]


class DenseReference:
    """Dense-array transcription of the five learners."""

    def __init__(self, kind, K, D, b, C, b2, seed, share_against_true_label=False):
        self.kind = kind
        self.K = K
        self.b, self.C, self.b2 = b, C, b2
        self.rng = np.random.Generator(np.random.PCG64(seed))
        self.w = [[0.0] * D for _ in range(K)]
        self.share_against_true_label = share_against_true_label
        if kind == 'amlc':
            self.tau = [[1.0 / K] * K for _ in range(K)]
        elif kind in ('peer', 'peer_share'):
            self.tau = [[0.0 if m == k else 1.0 / (K - 1) for m in range(K)] for k in range(K)]
        else:
            self.tau = None

    def add(self, k, y, x):
        self.w[k] = [wi + y * xi for wi, xi in zip(self.w[k], x)]

    def step(self, x, k, y):
        draw = float(self.rng.random())
        if self.kind in ('independent', 'random'):
            p = fdot(x, self.w[k])
            q = self.b / (self.b + abs(p)) if self.kind == 'independent' else 0.5
            if not draw < q:
                return dict(prediction=sgn(p), queried_oracle=False, queried_peer=False, mistake=None,
                            shared_to=[], updated_tasks=[])
            mistake = y != sgn(p)
            if mistake:
                self.add(k, y, x)
            return dict(prediction=sgn(p), queried_oracle=True, queried_peer=False, mistake=mistake,
                        shared_to=[], updated_tasks=[k] if mistake else [])

        if self.kind == 'amlc':
            p_k = [fdot(x, self.w[m]) for m in range(self.K)]
            p = math.fsum(p_k[m] * self.tau[k][m] for m in range(self.K))
            y_hat = sgn(p)
            if not draw < self.b / (self.b + abs(p)):
                return dict(prediction=y_hat, queried_oracle=False, queried_peer=False, mistake=None,
                            shared_to=[], updated_tasks=[])
            mistake = y != y_hat
            if mistake:
                self.add(k, y, x)
            losses = [max(0.0, 1.0 - y * p_k[m]) for m in range(self.K)]
            self.tau[k] = reweight(self.tau[k], losses, self.C)
            reference = y if self.share_against_true_label else y_hat
            shared = [m for m in range(self.K)
                      if m != k and sgn(p_k[m]) != reference and self.tau[k][m] >= self.tau[k][k]]
            for m in shared:
                self.add(m, y, x)
            updated = sorted(set(shared) | ({k} if mistake else set()))
            return dict(prediction=y_hat, queried_oracle=True, queried_peer=False, mistake=mistake,
                        shared_to=shared, updated_tasks=updated)

        # PEER family
        p_kk = fdot(x, self.w[k])
        own = sgn(p_kk)
        if not draw < self.b / (self.b + abs(p_kk)):
            return dict(prediction=own, queried_oracle=False, queried_peer=False, mistake=None,
                        shared_to=[], updated_tasks=[])
        peers = [m for m in range(self.K) if m != k]
        p_m = {m: fdot(x, self.w[m]) for m in peers}
        p_tilde = math.fsum(p_m[m] * self.tau[k][m] for m in peers)
        second = float(self.rng.random())
        b2 = self.b if self.b2 is None else self.b2
        if not second < b2 / (b2 + abs(p_tilde)):
            pseudo = sgn(p_tilde)
            if own != pseudo:
                self.add(k, pseudo, x)
            return dict(prediction=pseudo, queried_oracle=False, queried_peer=True, mistake=None,
                        shared_to=[], updated_tasks=[k] if own != pseudo else [])
        mistake = y != own
        if mistake:
            self.add(k, y, x)
        new_peer_row = reweight([self.tau[k][m] for m in peers],
                                [max(0.0, 1.0 - y * p_m[m]) for m in peers], self.C)
        self.tau[k] = [0.0] * self.K
        for m, value in zip(peers, new_peer_row):
            self.tau[k][m] = value
        shared = []
        if self.kind == 'peer_share':
            shared = [m for m in peers if sgn(p_m[m]) != y and self.tau[k][m] >= 1.0 / (self.K - 1)]
            for m in shared:
                self.add(m, y, x)
        updated = sorted(set(shared) | ({k} if mistake else set()))
        return dict(prediction=own, queried_oracle=True, queried_peer=False, mistake=mistake,
                    shared_to=shared, updated_tasks=updated)

    def final(self):
        if self.kind != 'amlc':
            return self.w
        return [[math.fsum(self.tau[k][m] * self.w[m][i] for m in range(self.K)) for i in range(len(self.w[0]))]
                for k in range(self.K)]


def stream_for(K, D, per_task, seed):
    dataset = synth_clustered(K=K, clusters=min(2, K), D=D, n_train=per_task, n_test=0,
                              label_noise=0.1, task_jitter=0.3, seed=seed)
    return [(k, dataset.tasks[k].train[i]) for k, i in shuffle_stream(dataset, seed=seed)]


def run_library(kind, K, hyper, seed, stream, **kwargs):
    learner = build_learner(kind, K, hyper, seed=seed, **kwargs)
    oracle = LabelOracle()
    trace = []
    for k, example in stream:
        oracle.present(example.label)
        trace.append(learner.step(example.features, k, oracle).as_dict())
    return learner, trace


class ReferenceEquivalenceTests(SimpleTestCase):
    D = 12

    def check(self, kind, K, seed, b=0.5, C=1.0, b2=None, **kwargs):
        stream = stream_for(K, self.D, per_task=max(2, 120 // K), seed=seed)
        hyper = HyperParams(b=b, C=C, b2=b2)
        learner, trace = run_library(kind, K, hyper, seed, stream, **kwargs)

        reference = DenseReference(kind, K, self.D, b, C, b2, seed, **kwargs)
        expected = [reference.step(example.features.to_dense(self.D), k, example.label) for k, example in stream]
        self.assertEqual(trace, expected, f'{kind} K={K} seed={seed}')

        for k in range(K):
            self.assertEqual(learner.state.w[k].to_dense(self.D), reference.w[k])
        if reference.tau is not None:
            np.testing.assert_allclose(learner.state.tau.to_list(), reference.tau, rtol=0, atol=1e-12)
        final = learner.finalize()
        for k in range(K):
            np.testing.assert_allclose(final[k].to_dense(self.D), reference.final()[k], rtol=0, atol=1e-12)

        counters = learner.state.counters
        self.assertEqual(counters.oracle_queries, sum(step['queried_oracle'] for step in trace))
        self.assertEqual(counters.peer_queries, sum(step['queried_peer'] for step in trace))

    def test_amlc_independent_random_match_reference(self):
        for K in (1, 2, 4):
            for seed in range(50):
                for kind in ('amlc', 'independent', 'random'):
                    self.check(kind, K, seed)

    def test_peer_family_matches_reference(self):
        for K in (2, 4):
            for seed in range(50):
                self.check('peer', K, seed)
                self.check('peer_share', K, seed, b2=0.8)

    def test_amlc_share_against_true_label_matches_reference(self):
        for seed in range(10):
            self.check('amlc', 4, seed, C=2.0, share_against_true_label=True)


class LearnerBehaviourTests(SimpleTestCase):
    def test_amlc_first_round_on_zero_weights(self):
        learner = build_learner(LearnerKind.AMLC, 3, HyperParams(), seed=0)
        oracle = LabelOracle()
        oracle.present(-1)
        x = SparseVector({0: 1.0, 2: -0.5})
        outcome = learner.step(x, 1, oracle)

        self.assertTrue(outcome.queried_oracle)
        self.assertEqual(outcome.prediction, 1)
        self.assertTrue(outcome.mistake)
        self.assertEqual(learner.state.w[1], x.scaled(-1.0))
        self.assertEqual(outcome.shared_to, frozenset())
        self.assertEqual(outcome.updated_tasks, frozenset({1}))
        for value in learner.state.tau.row(1):
            self.assertAlmostEqual(value, 1 / 3, delta=1e-15)

    def test_amlc_confident_round_changes_nothing(self):
        learner = build_learner(LearnerKind.AMLC, 2, HyperParams(), seed=0)
        learner.state.w.rows[0] = SparseVector({0: 5.0})
        learner.state.w.rows[1] = SparseVector({0: 5.0})
        tau_before = learner.state.tau.to_list()
        oracle = LabelOracle()
        oracle.present(-1)
        with patch.object(learner, 'draw', return_value=0.99):
            outcome = learner.step(SparseVector({0: 1.0}), 0, oracle)
        self.assertFalse(outcome.queried_oracle)
        self.assertIsNone(outcome.mistake)
        self.assertEqual(outcome.updated_tasks, frozenset())
        self.assertEqual(learner.state.w[0], SparseVector({0: 5.0}))
        self.assertEqual(learner.state.tau.to_list(), tau_before)
        self.assertEqual(oracle.queries, 0)

    def test_k1_amlc_reduces_to_independent(self):
        for seed in range(20):
            stream = stream_for(1, 10, per_task=100, seed=seed)
            amlc, amlc_trace = run_library(LearnerKind.AMLC, 1, HyperParams(), seed, stream)
            independent, independent_trace = run_library(LearnerKind.INDEPENDENT, 1, HyperParams(), seed, stream)
            self.assertEqual(amlc_trace, independent_trace)
            self.assertEqual(amlc.finalize()[0], independent.finalize()[0])

    def test_random_query_rate_is_one_half(self):
        learner = build_learner(LearnerKind.RANDOM, 1, HyperParams(), seed=123)
        oracle = LabelOracle()
        x = SparseVector({0: 1.0})
        for t in range(10_000):
            oracle.present(1 if t % 3 else -1)
            outcome = learner.step(x, 0, oracle)
            self.assertEqual(outcome.shared_to, frozenset())
        rate = learner.state.counters.oracle_queries / 10_000
        self.assertGreaterEqual(rate, 0.48)
        self.assertLessEqual(rate, 0.52)
        self.assertIsNone(learner.state.tau)

    def test_peer_confident_task_changes_nothing(self):
        learner = build_learner(LearnerKind.PEER, 3, HyperParams(), seed=0)
        learner.state.w.rows[0] = SparseVector({0: 3.0})
        oracle = LabelOracle()
        oracle.present(-1)
        with patch.object(learner, 'draw', side_effect=[0.9]):
            outcome = learner.step(SparseVector({0: 1.0}), 0, oracle)
        self.assertFalse(outcome.queried_oracle)
        self.assertFalse(outcome.queried_peer)
        self.assertEqual(outcome.prediction, 1)
        self.assertEqual(learner.state.w[0], SparseVector({0: 3.0}))
        self.assertEqual(learner.state.tau.row(0), [0.0, 0.5, 0.5])

    def test_peer_pseudo_label_moves_toward_disagreeing_peer(self):
        learner = build_learner(LearnerKind.PEER, 2, HyperParams(), seed=0)
        learner.state.w.rows[0] = SparseVector({0: 1.0})
        learner.state.w.rows[1] = SparseVector({0: -2.0})
        oracle = LabelOracle(budget=0)
        oracle.present(1)
        # own q = 1/2 (query peers), peer q = 1/3 (trust them)
        with patch.object(learner, 'draw', side_effect=[0.1, 0.9]):
            outcome = learner.step(SparseVector({0: 1.0}), 0, oracle)
        self.assertTrue(outcome.queried_peer)
        self.assertFalse(outcome.queried_oracle)
        self.assertEqual(outcome.prediction, -1)
        self.assertEqual(outcome.updated_tasks, frozenset({0}))
        self.assertFalse(learner.state.w[0])
        self.assertEqual(learner.state.counters.peer_queries, 1)
        self.assertEqual(oracle.queries, 0)

    def test_peer_share_with_single_peer_shares_on_peer_mistake(self):
        learner = build_learner(LearnerKind.PEER_SHARE, 2, HyperParams(), seed=0)
        learner.state.w.rows[0] = SparseVector({0: 1.0})
        learner.state.w.rows[1] = SparseVector({0: -2.0})
        oracle = LabelOracle()
        oracle.present(1)
        with patch.object(learner, 'draw', side_effect=[0.1, 0.1]):
            outcome = learner.step(SparseVector({0: 1.0}), 0, oracle)
        self.assertTrue(outcome.queried_oracle)
        self.assertFalse(outcome.mistake)
        self.assertEqual(outcome.shared_to, frozenset({1}))
        self.assertEqual(learner.state.w[1], SparseVector({0: -1.0}))
        self.assertEqual(learner.state.tau.row(0), [0.0, 1.0])

    def test_peer_share_uniform_committee_correct_peers_share_nothing(self):
        learner = build_learner(LearnerKind.PEER_SHARE, 3, HyperParams(), seed=0)
        for m in range(3):
            learner.state.w.rows[m] = SparseVector({0: 0.5})
        oracle = LabelOracle()
        oracle.present(1)
        with patch.object(learner, 'draw', side_effect=[0.0, 0.0]):
            outcome = learner.step(SparseVector({0: 1.0}), 0, oracle)
        self.assertTrue(outcome.queried_oracle)
        self.assertEqual(outcome.shared_to, frozenset())

    def test_peer_needs_two_tasks(self):
        for kind in (LearnerKind.PEER, LearnerKind.PEER_SHARE):
            with self.assertRaises(ConfigurationError):
                build_learner(kind, 1, HyperParams(), seed=0)

    def test_budget_exhaustion_leaves_state_untouched(self):
        learner = build_learner(LearnerKind.AMLC, 2, HyperParams(), seed=0)
        oracle = LabelOracle(budget=0)
        oracle.present(-1)
        with self.assertRaises(OracleBudgetExhausted):
            learner.step(SparseVector({0: 1.0}), 0, oracle)
        self.assertEqual(learner.state.w.rows, WeightMatrix.zeros(2).rows)
        self.assertEqual(learner.state.tau.row(0), [0.5, 0.5])
        self.assertEqual(learner.state.counters.oracle_queries, 0)

    def test_baselines_finalize_to_their_own_weights(self):
        learner = build_learner(LearnerKind.INDEPENDENT, 2, HyperParams(), seed=0)
        learner.state.w.rows[1] = SparseVector({4: 2.0})
        final = learner.finalize()
        self.assertEqual(final.rows, learner.state.w.rows)
        self.assertIsNot(final[1], learner.state.w[1])
