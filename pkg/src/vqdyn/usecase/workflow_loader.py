import copy
import logging
from enum import Enum
from typing import Any, Dict, List, Optional, Sequence, Tuple

import yaml
from dacite import (
    Config,
    DaciteError,
    ForwardReferenceError,
    MissingValueError,
    UnexpectedDataError,
    WrongTypeError,
    from_dict,
)

from vqdyn.errors import ConfigError, InvalidFieldError
from vqdyn.models.models import WorkflowConfig
from vqdyn.util import FileSystem


def parse_setting(setting: str) -> Tuple[List[str], Any]:
    """Split 'section.field=value' into a key path and a YAML-typed value."""
    if "=" not in setting:
        raise ConfigError(f"Invalid setting '{setting}', expected section.field=value")
    key, raw = setting.split("=", 1)
    path = [part for part in key.strip().lstrip("-").split(".") if part]
    if not path:
        raise ConfigError(f"Invalid setting '{setting}', missing field name")
    try:
        value = yaml.safe_load(raw)
    except yaml.YAMLError:
        value = raw
    return path, value


def apply_overrides(data: Dict[str, Any], overrides: Dict[str, Any]) -> Dict[str, Any]:
    """Return a copy of data with dotted-path overrides applied."""
    result = copy.deepcopy(data)
    for dotted, value in overrides.items():
        path = dotted.split(".")
        target = result
        for part in path[:-1]:
            node = target.get(part)
            if node is None:
                node = target[part] = {}
            elif not isinstance(node, dict):
                raise ConfigError(f"Cannot set '{dotted}': '{part}' is not a section", field_path=dotted)
            target = node
        target[path[-1]] = value
    return result


class WorkflowLoader:
    def __init__(self, logger: Optional[logging.Logger] = None):
        self._logger = logger or logging.getLogger(__name__)
        self._workflow_dir = FileSystem.get_workflows_directory()
        self._logger.debug(f"Workflow directory set to: {self._workflow_dir}")

    def read_workflow(self, name_or_path: str) -> Dict[str, Any]:
        """Raw YAML mapping of a workflow, with any top-level `workflow:` nesting removed."""
        path = FileSystem.resolve_workflow(name_or_path)
        self._logger.debug(f"Loading workflow from: {path}")
        if not path.is_file():
            raise ConfigError(f"Workflow file not found: {path}")
        try:
            with open(path, "r", encoding="utf-8") as file:
                data = yaml.safe_load(file) or {}
        except yaml.YAMLError as e:
            raise ConfigError(f"Invalid YAML in workflow '{path}': {e}") from e

        if isinstance(data, dict) and "workflow" in data and isinstance(data["workflow"], dict):
            self._logger.debug("Workflow data is nested under 'workflow' key, extracting...")
            data = data["workflow"]
        if not isinstance(data, dict):
            raise ConfigError(f"Workflow '{path}' must contain a mapping")
        data.setdefault("name", path.stem)
        return data

    def load_workflow(self, name_or_path: str, settings: Sequence[str] = ()) -> WorkflowConfig:
        """
        Load and validate a workflow.

        Args:
            name_or_path: Workflow name under the workflows directory, or a file path
            settings: 'section.field=value' overrides applied before validation

        Returns:
            The validated WorkflowConfig

        Raises:
            ConfigError: with the offending field path on schema violations
        """
        data = self.read_workflow(name_or_path)
        overrides = {}
        for setting in settings:
            path, value = parse_setting(setting)
            overrides[".".join(path)] = value
            self._logger.debug(f"Setting {'.'.join(path)}={value!r}")
        return self.build(apply_overrides(data, overrides))

    def build(self, data: Dict[str, Any]) -> WorkflowConfig:
        try:
            workflow = from_dict(data_class=WorkflowConfig, data=data, config=self._get_dacite_config())
        except WrongTypeError as e:
            raise ConfigError(f"Wrong type in workflow: {e}", field_path=e.field_path) from e
        except MissingValueError as e:
            raise ConfigError(f"Missing required value in workflow: {e}", field_path=e.field_path) from e
        except UnexpectedDataError as e:
            raise ConfigError(f"Unexpected data in workflow: {e}", field_path=",".join(sorted(e.keys))) from e
        except ForwardReferenceError as e:
            raise ConfigError(f"Forward reference error in workflow: {e}") from e
        except DaciteError as e:
            raise ConfigError(f"Failed to parse workflow: {e}", field_path=getattr(e, "field_path", None)) from e
        except InvalidFieldError as e:
            raise ConfigError(f"Invalid workflow value: {e}", field_path=e.field_path) from e
        except ValueError as e:
            raise ConfigError(f"Invalid workflow value: {e}") from e
        self._logger.debug(f"Successfully loaded workflow '{workflow.name}' ({workflow.model.kind.value})")
        return workflow

    def list_workflows(self) -> List[Dict[str, Any]]:
        """Basic information about every workflow file."""
        result = []
        for path in FileSystem.list_workflows():
            try:
                data = self.read_workflow(str(path))
                model = data.get("model") or {}
                result.append(
                    {
                        "name": path.stem,
                        "display_name": data.get("name", path.stem),
                        "description": data.get("description", ""),
                        "model": model.get("kind", "double-well"),
                        "filename": path.name,
                    }
                )
            except ConfigError as e:
                self._logger.warning(f"Error reading workflow '{path.stem}': {e}")
                result.append(
                    {
                        "name": path.stem,
                        "display_name": path.stem,
                        "description": "Error loading workflow",
                        "model": "?",
                        "filename": path.name,
                        "error": str(e),
                    }
                )
        return result

    def _get_dacite_config(self) -> Config:
        return Config(cast=[Enum, float], strict=True, check_types=True)
