use std::path::Path;

use serde::Deserialize;

use super::render::RenderConfig;

pub const TEMPLATE_COUNT: usize = 10;
pub const DEFAULT_PIPELINE_TOML: &str = include_str!("../../assets/pipeline.toml");

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineConfig {
    pub templates: Vec<String>,
    #[serde(default)]
    pub render: RenderConfig,
}

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("reading {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("parsing config: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("expected {TEMPLATE_COUNT} instruction templates, found {0}")]
    TemplateCount(usize),
    #[error("invalid render settings: {0}")]
    Render(String),
}

impl PipelineConfig {
    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        let cfg: PipelineConfig = toml::from_str(text)?;
        if cfg.templates.len() != TEMPLATE_COUNT {
            return Err(ConfigError::TemplateCount(cfg.templates.len()));
        }
        cfg.render.check().map_err(ConfigError::Render)?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_toml(&text)
    }
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self::from_toml(DEFAULT_PIPELINE_TOML).expect("bundled pipeline config is valid")
    }
}
