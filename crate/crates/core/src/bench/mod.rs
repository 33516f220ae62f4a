//! Training-sequence selection, the three evaluation tasks, metrics and
//! report files.

mod metrics;
mod protocol;
pub mod report;
mod split;

pub use metrics::{aggregate_document, cmc, confusion, hit_ratio, truth_rank, weighted_diagonal, ConfusionMatrix};
pub use protocol::{
    run_task, sample_features, train_task, test_type_label, Benchmark, BenchmarkRegistry, DenseMbLbpOnly, EvalReport,
    LbpHotFusion, RunOptions, SampleResult, Task, TestOutcome, TrainConfig, TrainedConfig, TEST_TYPES,
};
pub use report::write_reports;
pub use split::{budget_prefix, select_all, select_training, CellKey, CellSplit, Preset, SplitSpec, DEFAULT_BUDGET};
