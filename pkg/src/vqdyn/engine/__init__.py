from .engine_core import Command, WorkflowEngine, run_workflow, shot_settings

__all__ = ["Command", "WorkflowEngine", "run_workflow", "shot_settings"]
