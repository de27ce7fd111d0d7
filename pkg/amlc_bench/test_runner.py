import os

from django.test.runner import DiscoverRunner


class AcceptanceAwareRunner(DiscoverRunner):
    """
    Skips tests tagged 'acceptance' (multi-seed behavioural runs) unless
    AMLC_RUN_ACCEPTANCE=1 or the tag is requested explicitly with --tag.
    """

    def __init__(self, *args, tags=None, exclude_tags=None, **kwargs):
        exclude_tags = set(exclude_tags or ())
        run_acceptance = os.getenv('AMLC_RUN_ACCEPTANCE', '0').lower() in ('1', 'true', 'yes')
        if not run_acceptance and 'acceptance' not in (tags or ()):
            exclude_tags.add('acceptance')
        super().__init__(*args, tags=tags, exclude_tags=exclude_tags, **kwargs)
