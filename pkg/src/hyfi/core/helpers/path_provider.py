"""
Provides uniform and consistent path helpers for `hyfi`
"""
import os
from datetime import datetime
from pathlib import Path
from typing import Optional

from appdirs import user_data_dir

from hyfi.logging.exceptions import HyfiException

_user_data_env_var = "HYFI_USERDATA_PATH"


def _path() -> Optional[Path]:
    """Read the user data path override setting."""
    path_override = os.environ.get(_user_data_env_var)
    if path_override:
        return Path(path_override)
    return None


_application_name = "HyFi"


def override_application_data_path(path: Optional[str]) -> None:
    """
    Override the global application data path.

    If the value of path is `None` the environment variable gets deleted.
    """
    if path:
        os.environ[_user_data_env_var] = path
    else:
        os.environ.pop(_user_data_env_var, None)


_runs_folder_name = "runs"


def override_runs_folder_name(runs_folder_name: str) -> None:
    """Override the global runs folder name."""
    global _runs_folder_name
    _runs_folder_name = runs_folder_name


def _ensure_folder_exists(base_path: Path, folder_name: str) -> Path:
    path = base_path.joinpath(folder_name)
    path.mkdir(exist_ok=True, parents=True)
    return path


def user_application_data_path() -> Path:
    """Get the platform specific user data folder path"""
    path_override = _path()
    if path_override:
        return path_override

    try:
        return Path(user_data_dir(appname=_application_name, appauthor=False))
    except Exception as ex:
        raise HyfiException(
            message="Failed to initialize user application data path.", exception=ex
        )


def runs_folder_path() -> Path:
    """Get the folder where run directories are created by default."""
    return _ensure_folder_exists(user_application_data_path(), _runs_folder_name)


def new_run_path(command: str) -> Path:
    """A fresh, timestamped run directory for a command that got no `--out`."""
    stamp = datetime.now().strftime("%Y%m%d-%H%M%S-%f")
    return _ensure_folder_exists(runs_folder_path(), f"{command}-{stamp}")
