import sys
from pathlib import Path

import pytest

# Ensure project root is in sys.path
ROOT_DIR = Path(__file__).resolve().parent.parent
if str(ROOT_DIR) not in sys.path:
    sys.path.insert(0, str(ROOT_DIR))

from qproduct.numeric import PrecisionContext


@pytest.fixture
def ctx30():
    """30 requested digits, 50 working."""
    return PrecisionContext(requested_digits=30, working_digits=50)


@pytest.fixture
def ctx20():
    return PrecisionContext(requested_digits=20, working_digits=40)


@pytest.fixture
def settings_file(tmp_path, monkeypatch):
    """
    Points the settings store at a temporary file and clears the precision-cap
    override, reloading the module so CONFIG_PATH picks the change up.
    """
    import importlib

    import qproduct.config_store as config_store_module

    settings_path = tmp_path / "qproduct_settings.json"
    monkeypatch.setenv("QPROD_SETTINGS_PATH", str(settings_path))
    monkeypatch.delenv("QPROD_MAX_WORKING_DIGITS", raising=False)
    store = importlib.reload(config_store_module)
    try:
        yield store, settings_path
    finally:
        monkeypatch.delenv("QPROD_SETTINGS_PATH", raising=False)
        importlib.reload(config_store_module)
