import math

import numpy as np
from django.test import SimpleTestCase

from core.exceptions import ConfigurationError, OracleBudgetExhausted

from .model import (
    HyperParams,
    RelationshipMatrix,
    WeightMatrix,
    combine_model,
    committee_confidence,
    hinge_loss,
    per_task_confidences,
    predict_sign,
    query_probability,
    reweight_row,
    tau_row_update,
)
from .oracle import LabelOracle
from .sparsevec import SparseVector, axpy_into, dot, linear_combination


def random_sparse(rng, dim, density=0.4):
    dense = rng.standard_normal(dim) * (rng.random(dim) < density)
    return SparseVector.from_dense(dense.tolist()), dense


class SparseVectorTests(SimpleTestCase):
    def test_dot_with_empty_vector_is_zero(self):
        self.assertEqual(dot(SparseVector(), SparseVector({0: 5.0})), 0.0)

    def test_dot_one_overlapping_index(self):
        self.assertEqual(dot(SparseVector({1: 2.0, 3: -1.0}), SparseVector({3: 4.0})), -4.0)

    def test_axpy_into_zero_accumulator_copies_x(self):
        x = SparseVector({0: 1.5, 7: -2.0})
        self.assertEqual(axpy_into(1.0, x, SparseVector()), x)

    def test_axpy_into_prunes_exact_cancellation(self):
        w = axpy_into(-1.0, SparseVector({2: 3.0}), SparseVector({2: 3.0}))
        self.assertEqual(w.nnz(), 0)
        self.assertFalse(w)

    def test_axpy_into_hand_arithmetic(self):
        w = axpy_into(2.0, SparseVector({0: 1.0, 5: 0.5}), SparseVector({5: 1.0}))
        self.assertEqual(w, SparseVector({0: 2.0, 5: 2.0}))

    def test_axpy_into_mutates_in_place(self):
        w = SparseVector({1: 1.0})
        result = axpy_into(1.0, SparseVector({2: 1.0}), w)
        self.assertIs(result, w)
        self.assertEqual(w.sorted_items(), [(1, 1.0), (2, 1.0)])

    def test_constructor_drops_zeros_and_rejects_negative_indices(self):
        self.assertEqual(SparseVector({0: 0.0, 1: 2.0}).sorted_items(), [(1, 2.0)])
        with self.assertRaises(ValueError):
            SparseVector({-1: 1.0})

    def test_dot_symmetric_and_bilinear(self):
        rng = np.random.default_rng(7)
        for _ in range(200):
            a, _ = random_sparse(rng, 50)
            b, _ = random_sparse(rng, 50)
            alpha = float(rng.standard_normal())
            self.assertEqual(dot(a, b), dot(b, a))
            self.assertAlmostEqual(dot(a.scaled(alpha), b), alpha * dot(a, b), delta=1e-12)

    def test_sparse_algebra_matches_dense_reference(self):
        rng = np.random.default_rng(2024)
        for _ in range(10_000):
            dim = int(rng.integers(1, 60))
            x, x_dense = random_sparse(rng, dim)
            w, w_dense = random_sparse(rng, dim)
            alpha = float(rng.choice([-1.0, 1.0, rng.standard_normal()]))
            axpy_into(alpha, x, w)
            w_dense = w_dense + alpha * x_dense
            self.assertTrue(all(value != 0.0 for _, value in w.items()))
            np.testing.assert_allclose(w.to_dense(dim), w_dense, rtol=0, atol=1e-12)
            self.assertAlmostEqual(dot(x, w), float(np.dot(x_dense, w_dense)), delta=1e-12)

    def test_linear_combination_matches_dense(self):
        rng = np.random.default_rng(3)
        vectors, dense = zip(*(random_sparse(rng, 30) for _ in range(4)))
        coefficients = [0.1, 0.2, 0.3, 0.4]
        combined = linear_combination(coefficients, vectors)
        expected = sum(c * d for c, d in zip(coefficients, dense))
        np.testing.assert_allclose(combined.to_dense(30), expected, rtol=0, atol=1e-12)


class ModelFormulaTests(SimpleTestCase):
    def test_hinge_loss_examples(self):
        x = SparseVector({0: 1.0})
        self.assertEqual(hinge_loss(SparseVector(), x, 1), 1.0)
        self.assertEqual(hinge_loss(SparseVector({0: 2.0}), x, 1), 0.0)
        self.assertEqual(hinge_loss(SparseVector({0: 0.5}), x, -1), 1.5)

    def test_per_task_confidences(self):
        w = WeightMatrix([SparseVector({0: 1.0}), SparseVector({0: -1.0})])
        self.assertEqual(per_task_confidences(w, SparseVector({0: 2.0})), [2.0, -2.0])
        self.assertEqual(per_task_confidences(WeightMatrix.zeros(3), SparseVector({4: 1.0})), [0.0, 0.0, 0.0])

    def test_committee_confidence(self):
        self.assertEqual(committee_confidence([2.0, -1.0], [0.5, 0.5]), 0.5)
        self.assertEqual(committee_confidence([0.3, -7.0], [1.0, 0.0]), 0.3)

    def test_predict_sign_zero_is_positive(self):
        self.assertEqual(predict_sign(0.5), 1)
        self.assertEqual(predict_sign(-0.5), -1)
        self.assertEqual(predict_sign(0.0), 1)

    def test_query_probability(self):
        self.assertEqual(query_probability(1.0, 0.0), 1.0)
        self.assertEqual(query_probability(1.0, -1.0), 0.5)
        self.assertAlmostEqual(query_probability(2.0, 3.0), 0.4, places=12)

    def test_tau_row_update_hand_computation(self):
        row = tau_row_update([0.5, 0.5], [0.0, 2.0], 1.0)
        self.assertAlmostEqual(row[0], 0.731059, delta=1e-6)
        self.assertAlmostEqual(row[1], 0.268941, delta=1e-6)
        # ratio grows by exp(C * (2 - 0) / 2) = e
        self.assertAlmostEqual(row[0] / row[1], math.e, delta=1e-12)

    def test_tau_row_update_zero_losses_leaves_row(self):
        self.assertEqual(tau_row_update([0.2, 0.3, 0.5], [0.0, 0.0, 0.0], 5.0), [0.2, 0.3, 0.5])

    def test_underflowing_row_resets_to_uniform(self):
        with self.assertLogs('learning.model', level='WARNING'):
            update = reweight_row([1e-160, 1e-160], [1.0, 1.0], 1000.0)
        self.assertTrue(update.reset)
        self.assertEqual(update.row, [0.5, 0.5])

    def test_tau_row_update_fuzz_preserves_stochasticity_and_trust_order(self):
        rng = np.random.default_rng(11)
        for _ in range(10_000):
            K = int(rng.integers(1, 8))
            row = rng.random(K) + 1e-3
            row = (row / row.sum()).tolist()
            losses = (rng.random(K) * 3 * (rng.random(K) < 0.7)).tolist()
            C = float(10 ** rng.uniform(-4, 2))
            new_row = tau_row_update(row, losses, C)
            self.assertAlmostEqual(math.fsum(new_row), 1.0, delta=1e-12)
            self.assertTrue(all(value >= 0.0 for value in new_row))
            lam = math.fsum(losses)
            for m in range(K):
                if losses[m] == 0.0:
                    self.assertGreaterEqual(new_row[m], row[m] * (1 - 1e-12))
                for n in range(K):
                    if lam > 0 and losses[m] < losses[n] and new_row[n] > 0:
                        self.assertGreater(new_row[m] / new_row[n], row[m] / row[n] * (1 - 1e-12))

    def test_combine_model_identity_and_single_task(self):
        w = WeightMatrix([SparseVector({0: 1.0, 3: 2.0}), SparseVector({1: -1.0})])
        combined = combine_model(RelationshipMatrix.identity(2), w)
        self.assertEqual(combined.rows, w.rows)
        single = combine_model(RelationshipMatrix.uniform(1), WeightMatrix([SparseVector({2: 4.0})]))
        self.assertEqual(single[0], SparseVector({2: 4.0}))

    def test_combine_model_matches_committee_prediction(self):
        rng = np.random.default_rng(5)
        rows, dense = zip(*(random_sparse(rng, 20) for _ in range(3)))
        tau_dense = rng.random((3, 3))
        tau_dense /= tau_dense.sum(axis=1, keepdims=True)
        tau = RelationshipMatrix(tau_dense.tolist())
        combined = combine_model(tau, WeightMatrix(rows))
        expected = tau_dense @ np.array(dense)
        for k in range(3):
            np.testing.assert_allclose(combined[k].to_dense(20), expected[k], rtol=0, atol=1e-12)
        for _ in range(50):
            x, _ = random_sparse(rng, 20, density=0.8)
            p_k = per_task_confidences(WeightMatrix(rows), x)
            for k in range(3):
                self.assertAlmostEqual(dot(x, combined[k]), committee_confidence(p_k, tau[k]), delta=1e-9)

    def test_combine_model_shape_mismatch(self):
        with self.assertRaises(ConfigurationError):
            combine_model(RelationshipMatrix.uniform(3), WeightMatrix.zeros(2))

    def test_hyper_params_validation(self):
        with self.assertRaises(ConfigurationError):
            HyperParams(b=0.0)
        with self.assertRaises(ConfigurationError):
            HyperParams(C=-1.0)
        with self.assertRaises(ConfigurationError):
            HyperParams(b2=0.0)
        self.assertEqual(HyperParams(b=2.0).peer_b, 2.0)
        self.assertEqual(HyperParams(b=2.0, b2=0.5).peer_b, 0.5)

    def test_peer_committee_needs_two_tasks(self):
        with self.assertRaises(ConfigurationError):
            RelationshipMatrix.peers_uniform(1)
        self.assertEqual(RelationshipMatrix.peers_uniform(3).row(0), [0.0, 0.5, 0.5])


class LabelOracleTests(SimpleTestCase):
    def test_budget_raises_before_counting(self):
        oracle = LabelOracle(budget=1)
        oracle.present(-1)
        self.assertEqual(oracle.query(), -1)
        self.assertTrue(oracle.exhausted)
        with self.assertRaises(OracleBudgetExhausted):
            oracle.query()
        self.assertEqual(oracle.queries, 1)
        self.assertEqual(oracle.remaining, 0)

    def test_unlimited_oracle(self):
        oracle = LabelOracle()
        oracle.present(1)
        for _ in range(5):
            oracle.query()
        self.assertIsNone(oracle.remaining)
        self.assertFalse(oracle.exhausted)

    def test_zero_budget_is_exhausted_immediately(self):
        oracle = LabelOracle(budget=0)
        oracle.present(1)
        with self.assertRaises(OracleBudgetExhausted):
            oracle.query()
