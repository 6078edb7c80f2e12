from .workflow_loader import WorkflowLoader, apply_overrides, parse_setting

__all__ = ["WorkflowLoader", "apply_overrides", "parse_setting"]
