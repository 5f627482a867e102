from pathlib import Path

import pytest

from hyfi.core.helpers import path_provider


@pytest.fixture()
def clean_override(monkeypatch):
    monkeypatch.delenv("HYFI_USERDATA_PATH", raising=False)
    yield
    path_provider.override_application_data_path(None)


def test_user_application_data_path(clean_override):
    user_path = path_provider.user_application_data_path()
    assert user_path.name == "HyFi"


def test_user_application_data_path_override(clean_override):
    path = "/jiberish"
    path_provider.override_application_data_path(path)

    user_path = path_provider.user_application_data_path()
    assert Path(path) == user_path

    path_provider.override_application_data_path(None)

    user_path = path_provider.user_application_data_path()
    assert Path(path) != user_path


def test_runs_folder_name_override():
    old_folder_name = path_provider._runs_folder_name
    assert old_folder_name == "runs"
    new_folder_name = "foobar"
    path_provider.override_runs_folder_name(new_folder_name)
    assert path_provider._runs_folder_name == new_folder_name
    path_provider.override_runs_folder_name(old_folder_name)


def test_new_run_path(clean_override, tmp_path):
    path_provider.override_application_data_path(str(tmp_path))
    run_path = path_provider.new_run_path("train")
    assert run_path.is_dir()
    assert run_path.parent == tmp_path / "runs"
    assert run_path.name.startswith("train-")
