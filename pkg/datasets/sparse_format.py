"""
Sparse example lines:

    <label> <index>:<value> <index>:<value> ...

label is +1 or -1, indices are strictly increasing nonnegative integers,
values are finite decimal reals, `#` starts a comment and blank lines are
ignored.
"""
import logging
import math
import os
from pathlib import Path

from core.exceptions import DataError, DataFormatError
from learning.sparsevec import SparseVector

from .types import Example

logger = logging.getLogger(__name__)


def parse_line(line, line_number=None, source=None):
    """Returns (label, SparseVector), or None for blank/comment lines."""
    content = line.split('#', 1)[0].strip()
    if not content:
        return None
    tokens = content.split()
    try:
        label_value = float(tokens[0])
    except ValueError:
        raise DataFormatError(f'label {tokens[0]!r} is not a number', source, line_number)
    if label_value not in (1.0, -1.0):
        raise DataFormatError(f'label {tokens[0]!r} must be +1 or -1', source, line_number)

    entries = []
    previous = -1
    for token in tokens[1:]:
        index_text, sep, value_text = token.partition(':')
        if not sep:
            raise DataFormatError(f'feature {token!r} is not index:value', source, line_number)
        try:
            index = int(index_text)
            value = float(value_text)
        except ValueError:
            raise DataFormatError(f'feature {token!r} is not index:value', source, line_number)
        if not math.isfinite(value):
            raise DataFormatError(f'feature {token!r} has a non-finite value', source, line_number)
        if index < 0:
            raise DataFormatError(f'feature index {index} is negative', source, line_number)
        if index == previous:
            raise DataFormatError(f'duplicate feature index {index}', source, line_number)
        if index < previous:
            raise DataFormatError(
                f'feature indices must be strictly increasing ({index} after {previous})', source, line_number
            )
        previous = index
        entries.append((index, value))
    return int(label_value), SparseVector(entries)


def decoded_lines(path):
    """Yields (line_number, text); undecodable bytes are reported with their line."""
    with Path(path).open('rb') as handle:
        for line_number, raw in enumerate(handle, start=1):
            try:
                yield line_number, raw.decode('utf-8')
            except UnicodeDecodeError as exc:
                raise DataFormatError(f'line is not valid UTF-8 ({exc.reason})', path, line_number)


def read_examples(path, task):
    path = Path(path)
    if not path.is_file():
        raise DataError(f'Example file not found: {path}')
    examples = []
    for line_number, line in decoded_lines(path):
        parsed = parse_line(line, line_number, path)
        if parsed is None:
            continue
        label, features = parsed
        examples.append(Example(features=features, label=label, task=task))
    logger.debug(f'Read {len(examples)} examples for task index {task} from {path}')
    return examples


def format_line(example):
    label = '+1' if example.label > 0 else '-1'
    features = ' '.join(f'{i}:{v!r}' for i, v in example.features.sorted_items())
    return f'{label} {features}'.rstrip()


def write_examples(path, examples):
    """Written to a temporary sibling and moved into place."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_name(path.name + '.tmp')
    try:
        with tmp.open('w', encoding='utf-8') as handle:
            for example in examples:
                handle.write(format_line(example))
                handle.write('\n')
        os.replace(tmp, path)
    except BaseException:
        tmp.unlink(missing_ok=True)
        raise
    return path
