"""Wood/leaf classification of tree terrestrial point clouds.

Thin Python layer over the C++ core: exact kNN search, local geometric
features, plane-fit residual training-set selection, an SMO-trained RBF SVM,
confusion metrics and a seeded synthetic tree generator.
"""

from woodleaf._woodleaf import (  # noqa: F401
    ConfigError,
    ConfusionMatrix,
    FeatureVector,
    IoError,
    KappaVariant,
    Label,
    Metrics,
    NeighborSet,
    NumericError,
    ParseError,
    PipelineResult,
    PlaneFit,
    PointCloud,
    RunConfig,
    SampleProfile,
    SamplingMethod,
    SpatialIndex,
    SuitePreset,
    SvmHyperparams,
    SvmModel,
    SyntheticTree,
    TrainResult,
    TrainStats,
    TrainingEntry,
    TrainingSet,
    TreeSpec,
    __version__,
    auto_select_training,
    classify_cloud,
    compute_features,
    confusion,
    decision_value,
    fit_plane,
    generate_suite,
    generate_tree,
    improvement,
    kappa,
    load_model,
    metrics,
    overall_accuracy,
    predict,
    read_feature_csv,
    read_labels,
    read_ply,
    read_xyz,
    run_pipeline,
    save_model,
    seed_sphere_training,
    select_candidates,
    train,
    training_from_labels,
    write_classified_ply,
    write_feature_csv,
    write_labels,
    write_xyz,
)
