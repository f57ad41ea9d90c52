//! Training-corpus construction: deduplication, fixed-view rendering, instruction
//! records and captioning.

mod build;
mod caption;
mod config;
mod dedup;
mod records;
mod render;

pub use build::{
    build_dataset, load_model_dir, make_image_records, BuildOptions, BuildSummary, DatasetError,
    DatasetMode, ImageRecord, Rejections, IMAGES_DIR, RECORDS_FILE,
};
pub use caption::{
    CaptionClient, CaptionError, CaptionVerdict, HttpCaptionClient, HttpResponse, MockCaptioner,
    RateLimiter, RetryPolicy, Transport, UreqTransport, API_KEY_VAR, ENDPOINT_VAR,
};
pub use config::{ConfigError, PipelineConfig, DEFAULT_PIPELINE_TOML, TEMPLATE_COUNT};
pub use dedup::{dedup_key, deduplicate};
pub use records::{
    image_record, make_text_records, read_jsonl, template_index, write_jsonl, TuningRecord, Turn,
    IMAGE_PLACEHOLDER,
};
pub use render::{render_fixed_view, render_model, RenderConfig, RenderError, RenderedImage};
