class AMLCError(Exception):
    """Base for every error the library reports to its callers."""
    default_detail = 'Experiment failed.'
    default_code = 'error'
    exit_code = 1

    def __init__(self, detail=None):
        self.detail = detail if detail is not None else self.default_detail
        super().__init__(self.detail)


class ConfigurationError(AMLCError):
    default_detail = 'Invalid experiment configuration.'
    default_code = 'bad_configuration'
    exit_code = 2


class DataError(AMLCError):
    default_detail = 'Dataset could not be loaded.'
    default_code = 'bad_data'
    exit_code = 3


class DataFormatError(DataError):
    """
    Malformed sparse example line. Carries the source path and the
    1-based line number so the message points at the offending line.
    """
    default_code = 'malformed_line'

    def __init__(self, detail, source=None, line_number=None):
        self.source = source
        self.line_number = line_number
        location = ''
        if source is not None:
            location = f'{source}:{line_number}: ' if line_number is not None else f'{source}: '
        super().__init__(f'{location}{detail}')


class ManifestError(DataError):
    default_detail = 'Dataset manifest is invalid.'
    default_code = 'bad_manifest'


class TaskTooSmallError(DataError):
    default_code = 'task_too_small'

    def __init__(self, task_id, available, required):
        self.task_id = task_id
        super().__init__(
            f'Task {task_id} has {available} examples; more than {required} are required'
        )


class EmptyTestSetError(DataError):
    default_detail = 'Split leaves no test examples.'
    default_code = 'empty_test_set'


class AggregationError(AMLCError):
    default_detail = 'Nothing to aggregate.'
    default_code = 'empty_aggregation'


class OracleBudgetExhausted(AMLCError):
    """
    Raised by the label oracle when a query is demanded after the budget is
    spent. Learners request the label before touching any state, so a step
    that raises this leaves the learner unchanged.
    """
    default_detail = 'Oracle query budget exhausted.'
    default_code = 'budget_exhausted'
