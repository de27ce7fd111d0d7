import logging

from celery import shared_task

from .services.cells import run_cell

logger = logging.getLogger("experiments.tasks")


@shared_task(
    bind=True,
    name="experiments.run_cell"
)
def run_cell_task(self, payload):
    """
    Celery task running one sweep/CV cell. The dataset is rebuilt from the
    source reference carried in the payload's config.
    """
    logger.info(f"[RunCellTask] Running cell {payload.get('key')}")
    return run_cell(payload)
