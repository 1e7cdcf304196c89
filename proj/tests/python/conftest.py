import os
import pathlib
import shutil

import pytest


@pytest.fixture(scope="session")
def cli():
    path = os.environ.get("RTSWE_CLI") or shutil.which("rtswe")
    if not path:
        pytest.skip("rtswe executable not found; set RTSWE_CLI")
    return pathlib.Path(path)
