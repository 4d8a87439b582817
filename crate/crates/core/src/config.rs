//! User-facing job configuration.

use crate::error::{Error, Result};
use std::fmt;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ContainerMode {
    Auto,
    Hash,
    LocalArray,
    GlobalAtomicArray,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PipelineMode {
    Auto,
    On,
    Off,
}

/// How map operations hand their pairs to the combiner.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MapStyle {
    /// Every emit goes straight into the container.
    Scalar,
    /// Emits are staged in an [`EmitBuffer`](crate::containers::EmitBuffer) and combined in bulk.
    Buffered,
}

/// String hashing kernel used when a buffered batch of byte keys is flushed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum HashMode {
    Scalar,
    Padding,
    Stream,
}

macro_rules! cli_enum {
    ($ty:ident { $($name:literal => $variant:ident),+ $(,)? }) => {
        impl $ty {
            pub fn as_str(&self) -> &'static str {
                match self {
                    $($ty::$variant => $name,)+
                }
            }
        }

        impl fmt::Display for $ty {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.as_str())
            }
        }

        impl FromStr for $ty {
            type Err = Error;

            fn from_str(s: &str) -> Result<Self> {
                match s {
                    $($name => Ok($ty::$variant),)+
                    other => Err(Error::InvalidArgument(format!(
                        "unknown {} value `{}`",
                        stringify!($ty),
                        other
                    ))),
                }
            }
        }
    };
}

cli_enum!(ContainerMode {
    "auto" => Auto,
    "hash" => Hash,
    "local-array" => LocalArray,
    "global-array" => GlobalAtomicArray,
});
cli_enum!(PipelineMode { "auto" => Auto, "on" => On, "off" => Off });
cli_enum!(MapStyle { "scalar" => Scalar, "buffered" => Buffered });
cli_enum!(HashMode { "scalar" => Scalar, "padding" => Padding, "stream" => Stream });

pub const DEFAULT_LANE_WIDTH: usize = 16;
pub const DEFAULT_EMIT_BUFFER_CAPACITY: usize = 1024;
pub const DEFAULT_LOCAL_TABLE_BUDGET: usize = 256 * 1024;
pub const DEFAULT_L2_BUDGET: usize = 512 * 1024;
pub const DEFAULT_MEMORY_BUDGET: u64 = 8 << 30;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JobConfig {
    pub app_id: String,
    pub map_workers: usize,
    pub reduce_workers: usize,
    pub container_mode: ContainerMode,
    pub pipeline_mode: PipelineMode,
    pub map_style: MapStyle,
    pub hash_mode: HashMode,
    pub lane_width: usize,
    pub emit_buffer_capacity: usize,
    /// Byte budget of a pipelined local hash table.
    pub local_table_budget: usize,
    pub l2_budget: usize,
    pub memory_budget: u64,
    pub rng_seed: u64,
}

impl Default for JobConfig {
    fn default() -> Self {
        JobConfig {
            app_id: String::new(),
            map_workers: 1,
            reduce_workers: 1,
            container_mode: ContainerMode::Auto,
            pipeline_mode: PipelineMode::Auto,
            map_style: MapStyle::Scalar,
            hash_mode: HashMode::Scalar,
            lane_width: DEFAULT_LANE_WIDTH,
            emit_buffer_capacity: DEFAULT_EMIT_BUFFER_CAPACITY,
            local_table_budget: DEFAULT_LOCAL_TABLE_BUDGET,
            l2_budget: DEFAULT_L2_BUDGET,
            memory_budget: DEFAULT_MEMORY_BUDGET,
            rng_seed: 0,
        }
    }
}

impl JobConfig {
    pub fn new(app_id: impl Into<String>) -> Self {
        JobConfig {
            app_id: app_id.into(),
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("map_workers", self.map_workers),
            ("reduce_workers", self.reduce_workers),
            ("lane_width", self.lane_width),
            ("emit_buffer_capacity", self.emit_buffer_capacity),
        ];
        for (name, value) in positive {
            if value == 0 {
                return Err(Error::InvalidArgument(format!("{name} must be at least 1")));
            }
        }
        if self.local_table_budget > self.l2_budget {
            return Err(Error::InvalidArgument(format!(
                "local_table_budget ({}) exceeds l2_budget ({})",
                self.local_table_budget, self.l2_budget
            )));
        }
        Ok(())
    }
}
