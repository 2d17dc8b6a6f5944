"""Causal structure discovery and what-if effect estimation for design spaces.

The package walks a four-step loop on parametric design data: find a causal
skeleton from generated samples, let an expert prune and orient it, identify
valid adjustment sets for a treatment/outcome query, and quantify the
interventional effect with full per-unit distributions.  A transparent
steady-state heating-load model supplies training data and ground-truth
effects for validation, and a boosted-tree baseline shows what structure-
blind what-if answers look like by comparison.
"""

from .baseline import (
    BaselineConfig,
    CvReport,
    TreeEnsemble,
    cross_validate,
    fit_baseline,
    naive_whatif,
)
from .dataset import (
    Dataset,
    ParameterSpec,
    default_schema,
    generate_dataset,
    load_csv,
    sample_configs,
    save_csv,
)
from .discovery import (
    DiscoveryResult,
    GesConfig,
    cpdag_of_dag,
    design_space_config,
    ges_discover,
    local_bic,
    run_ges,
)
from .estimation import (
    EffectEstimate,
    FittedScm,
    Scenario,
    estimate_ate,
    estimate_cate,
    fit_scm,
    simulate_do,
)
from .graphs import (
    CausalGraph,
    KnowledgeConstraints,
    PathDiagnostic,
    apply_knowledge,
    classify_paths,
    export_graph,
    is_d_separated,
    parse_graph,
)
from .identify import (
    Estimand,
    identify_estimand,
    is_valid_adjustment,
    minimal_adjustment_sets,
)
from .oracle import (
    BuildingConfig,
    OracleConstants,
    derive_geometry,
    ground_truth_dag,
    heating_load,
    paired_effect,
)

__version__ = "0.1.0"

__all__ = [
    "BaselineConfig",
    "BuildingConfig",
    "CausalGraph",
    "CvReport",
    "Dataset",
    "DiscoveryResult",
    "EffectEstimate",
    "Estimand",
    "FittedScm",
    "GesConfig",
    "KnowledgeConstraints",
    "OracleConstants",
    "ParameterSpec",
    "PathDiagnostic",
    "Scenario",
    "TreeEnsemble",
    "apply_knowledge",
    "classify_paths",
    "cpdag_of_dag",
    "cross_validate",
    "default_schema",
    "derive_geometry",
    "design_space_config",
    "estimate_ate",
    "estimate_cate",
    "export_graph",
    "fit_baseline",
    "fit_scm",
    "generate_dataset",
    "ges_discover",
    "ground_truth_dag",
    "heating_load",
    "identify_estimand",
    "is_d_separated",
    "is_valid_adjustment",
    "load_csv",
    "local_bic",
    "minimal_adjustment_sets",
    "naive_whatif",
    "paired_effect",
    "parse_graph",
    "run_ges",
    "sample_configs",
    "save_csv",
    "simulate_do",
]
