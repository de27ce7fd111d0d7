import logging
from concurrent.futures import ProcessPoolExecutor

logger = logging.getLogger(__name__)


def _sorted_payloads(payloads):
    return sorted(payloads, key=lambda payload: tuple(map(str, payload['key'])))


def _run_local(fn, payloads, workers, dataset, initializer):
    if workers <= 1 or len(payloads) <= 1:
        return [fn(payload, dataset) for payload in payloads]
    with ProcessPoolExecutor(max_workers=workers, initializer=initializer, initargs=(dataset,)) as pool:
        return list(pool.map(fn, payloads))


def dispatch_cells(fn, payloads, workers=1, dataset=None, initializer=None, celery_task=None):
    """
    Run every cell payload and return results ordered by cell key.

    With celery_task, cells are queued as a Celery group and gathered;
    if queueing fails, they fall back to in-process execution. Otherwise
    they run serially, or on a process pool when workers > 1. Ordering by
    key makes every path produce the same result list.
    """
    payloads = _sorted_payloads(payloads)

    if celery_task is not None:
        try:
            from celery import group
            result = group(celery_task.s(payload) for payload in payloads).apply_async()
            return result.get(disable_sync_subtasks=False)
        except Exception as queue_error:
            logger.error(
                "Failed to run %d cells on Celery task %s: %s; running them locally",
                len(payloads),
                getattr(celery_task, "name", str(celery_task)),
                queue_error,
                exc_info=True,
            )

    return _run_local(fn, payloads, workers, dataset, initializer)
