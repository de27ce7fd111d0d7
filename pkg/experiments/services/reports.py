"""
Report files. Everything is written to a temporary sibling and moved into
place, so a failed command never leaves a partial file behind.
"""
import csv
import io
import json
import logging
import os
from dataclasses import asdict
from pathlib import Path

from core.exceptions import DataError
from learning.model import WeightMatrix

from .sweeps import SWEEP_CSV_HEADER

logger = logging.getLogger(__name__)


def write_text_atomic(path, text):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_name(f'.{path.name}.tmp')
    try:
        tmp.write_text(text, encoding='utf-8')
        os.replace(tmp, path)
    except BaseException:
        tmp.unlink(missing_ok=True)
        raise
    return path


def dumps(data):
    return json.dumps(data, sort_keys=True, indent=2, ensure_ascii=False) + '\n'


def write_json_atomic(path, data):
    return write_text_atomic(path, dumps(data))


def run_report_path(directory, report):
    return Path(directory) / f'{report.dataset}.{report.learner}.seed{report.seed}.json'


def write_run_report(directory, report, include_timing=False):
    from experiments.serializers import RunReportSerializer

    data = RunReportSerializer(report, include_timing=include_timing).data
    path = write_json_atomic(run_report_path(directory, report), data)
    logger.debug(f'Wrote run report {path}')
    return path


def sweep_csv_text(rows):
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator='\n')
    writer.writerow(SWEEP_CSV_HEADER)
    for row in rows:
        values = asdict(row)
        writer.writerow([
            '' if values[column] is None else (int(values[column]) if column == 'exhausted' else values[column])
            for column in SWEEP_CSV_HEADER
        ])
    return buffer.getvalue()


def write_sweep_csv(path, rows):
    return write_text_atomic(path, sweep_csv_text(rows))


def save_model(path, model: WeightMatrix, learner, dataset_name):
    return write_json_atomic(path, {
        'learner': learner,
        'dataset': dataset_name,
        'rows': model.to_payload(),
    })


def load_model(path) -> WeightMatrix:
    path = Path(path)
    if not path.is_file():
        raise DataError(f'Model file not found: {path}')
    try:
        payload = json.loads(path.read_text(encoding='utf-8'))
        return WeightMatrix.from_payload(payload['rows'])
    except (ValueError, KeyError, TypeError) as exc:
        raise DataError(f'Model file {path} is not a saved weight matrix: {exc}')
