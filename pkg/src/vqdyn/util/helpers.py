import os
from pathlib import Path
from typing import List, Optional

import yaml


class FileSystem:
    """Locates the packaged settings and workflow directories."""

    @staticmethod
    def __get_base_dir() -> str:
        # src/vqdyn/util -> repository root when running from source
        current_path = os.path.abspath(os.path.dirname(__file__))
        return os.path.abspath(os.path.join(current_path, "../../../"))

    @staticmethod
    def __resolve(env_var: str, name: str) -> str:
        env_dir = os.environ.get(env_var)
        if env_dir:
            return env_dir
        base_dir = FileSystem.__get_base_dir()
        src_dir = os.path.join(base_dir, "src", name)
        if os.path.isdir(src_dir):
            return src_dir
        # installed layout: settings/ and workflows/ sit next to the package
        installed_dir = os.path.join(base_dir, name)
        if os.path.isdir(installed_dir):
            return installed_dir
        return os.path.abspath(os.path.join(os.path.dirname(__file__), "../..", name))

    @staticmethod
    def get_settings_directory() -> str:
        """Absolute path of the settings directory, honouring VQDYN_SETTINGS_DIR."""
        return FileSystem.__resolve("VQDYN_SETTINGS_DIR", "settings")

    @staticmethod
    def get_workflows_directory() -> str:
        """Absolute path of the workflows directory, honouring VQDYN_WORKFLOW_DIR."""
        return FileSystem.__resolve("VQDYN_WORKFLOW_DIR", "workflows")

    @staticmethod
    def list_workflows() -> List[Path]:
        directory = Path(FileSystem.get_workflows_directory())
        if not directory.is_dir():
            return []
        return sorted(directory.glob("*.yaml"))

    @staticmethod
    def resolve_workflow(name_or_path: str) -> Path:
        """
        Resolve a workflow argument to a file.

        A value that names an existing file is used as-is; otherwise it is looked up as
        `<workflows dir>/<name>.yaml`.
        """
        candidate = Path(name_or_path)
        if candidate.is_file():
            return candidate
        return Path(FileSystem.get_workflows_directory()) / f"{name_or_path}.yaml"

    @staticmethod
    def load_configuration(
        name: str = "configuration.yaml", config_directory: Optional[str] = None
    ) -> dict:
        if config_directory is None:
            config_directory = FileSystem.get_settings_directory()
        path = os.path.join(config_directory, name)
        if not os.path.exists(path):
            return {}
        with open(path, "r", encoding="utf-8") as file:
            input_data = yaml.safe_load(file)

        # Dictionary should always be returned, including empty
        if input_data is None:
            return {}

        return input_data
