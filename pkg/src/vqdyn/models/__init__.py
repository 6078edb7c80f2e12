from .models import (
    AnsatzConfig,
    DipoleRoute,
    DoubleWellParams,
    EigenConfig,
    EigenMethod,
    EvaluationPath,
    ExactConfig,
    ExecutionConfig,
    HeliumParams,
    InitKind,
    IntegratorConfig,
    ModelConfig,
    ModelKind,
    Optimizer,
    PulseConfig,
    PulseShape,
    Reference,
    Scheme,
    ShotConfig,
    ShotMode,
    SpectrumConfig,
    SubspaceConfig,
    VQAConfig,
    Window,
    WorkflowConfig,
)

__all__ = [
    "AnsatzConfig",
    "DipoleRoute",
    "DoubleWellParams",
    "EigenConfig",
    "EigenMethod",
    "EvaluationPath",
    "ExactConfig",
    "ExecutionConfig",
    "HeliumParams",
    "InitKind",
    "IntegratorConfig",
    "ModelConfig",
    "ModelKind",
    "Optimizer",
    "PulseConfig",
    "PulseShape",
    "Reference",
    "Scheme",
    "ShotConfig",
    "ShotMode",
    "SpectrumConfig",
    "SubspaceConfig",
    "VQAConfig",
    "Window",
    "WorkflowConfig",
]
