import os

import pytest

# Trials must merge deterministically regardless of the host; the suite
# exercises the threaded path explicitly where it matters.
os.environ.setdefault("CRNFORGE_THREADS", "1")


@pytest.fixture()
def data_path():
    import crnforge

    return crnforge.data_path
