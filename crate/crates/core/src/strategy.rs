//! Resolution of the user's requested modes into a concrete execution plan.

use crate::app::{AppSpec, ContainerHint};
use crate::config::{ContainerMode, HashMode, JobConfig, MapStyle, PipelineMode};
use crate::error::{Error, Result};
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ContainerKind {
    Hash,
    LocalArray,
    GlobalAtomicArray,
    MapOnly,
}

impl ContainerKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ContainerKind::Hash => "hash",
            ContainerKind::LocalArray => "local-array",
            ContainerKind::GlobalAtomicArray => "global-array",
            ContainerKind::MapOnly => "map-only",
        }
    }
}

impl fmt::Display for ContainerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExecutionPlan {
    pub container_kind: ContainerKind,
    pub pipelined: bool,
    pub map_style: MapStyle,
    pub hash_mode: HashMode,
    pub lane_width: usize,
    /// Upper bound on concurrent map workers for this container.
    pub max_map_threads: u64,
    /// Map workers actually launched: `min(requested, max_map_threads)`.
    pub map_workers: usize,
    pub reduce_workers: usize,
}

/// `floor(memory_budget / local_array_bytes)`: how many private arrays fit.
pub fn max_map_threads(memory_budget: u64, local_array_bytes: u64) -> Result<u64> {
    if local_array_bytes == 0 {
        return Err(Error::InvalidArgument("local array size must be positive".into()));
    }
    Ok(memory_budget / local_array_bytes)
}

fn auto_container(spec: &AppSpec, array_bytes: Option<u64>, l2_budget: usize) -> ContainerKind {
    match spec.container_hint {
        ContainerHint::Hash => ContainerKind::Hash,
        ContainerHint::MapOnly => ContainerKind::MapOnly,
        ContainerHint::Array { .. } => {
            let bytes = array_bytes.or(spec.array_bytes()).unwrap_or(0);
            if bytes > l2_budget as u64 && spec.combiner.is_atomic_capable() {
                ContainerKind::GlobalAtomicArray
            } else {
                ContainerKind::LocalArray
            }
        }
    }
}

pub fn select_strategy(
    config: &JobConfig,
    spec: &AppSpec,
    array_bytes_per_worker: Option<u64>,
) -> Result<ExecutionPlan> {
    config.validate()?;
    let suggested = auto_container(spec, array_bytes_per_worker, config.l2_budget);

    let container_kind = match (spec.container_hint, config.container_mode) {
        (ContainerHint::MapOnly, mode) => {
            if mode != ContainerMode::Auto {
                log::warn!("{}: map-only application ignores container mode {mode}", spec.app_id);
            }
            ContainerKind::MapOnly
        }
        (_, ContainerMode::Auto) => suggested,
        (_, ContainerMode::Hash) => ContainerKind::Hash,
        (ContainerHint::Hash, mode) => {
            return Err(Error::UnsupportedStrategy(format!(
                "{}: {mode} needs fixed-range integer keys",
                spec.app_id
            )))
        }
        (ContainerHint::Array { .. }, ContainerMode::LocalArray) => ContainerKind::LocalArray,
        (ContainerHint::Array { .. }, ContainerMode::GlobalAtomicArray) => {
            ContainerKind::GlobalAtomicArray
        }
    };

    let array_kinds = [ContainerKind::LocalArray, ContainerKind::GlobalAtomicArray];
    if array_kinds.contains(&container_kind) && !spec.combiner.is_atomic_capable() {
        return Err(Error::UnsupportedStrategy(format!(
            "{}: {container_kind} needs a sum or bitwise-or combiner, not {:?}",
            spec.app_id, spec.combiner
        )));
    }
    if container_kind != suggested {
        log::info!(
            "{}: using {container_kind} as requested; auto selection would pick {suggested}",
            spec.app_id
        );
    }

    let pipelined = match config.pipeline_mode {
        PipelineMode::Auto => container_kind == ContainerKind::Hash,
        PipelineMode::Off => false,
        PipelineMode::On if container_kind == ContainerKind::Hash => true,
        PipelineMode::On => {
            return Err(Error::UnsupportedStrategy(format!(
                "{}: pipelining requires the hash container, plan uses {container_kind}",
                spec.app_id
            )))
        }
    };
    if config.pipeline_mode == PipelineMode::Off && container_kind == ContainerKind::Hash {
        log::info!("{}: pipelining disabled by request", spec.app_id);
    }

    let max_threads = if container_kind == ContainerKind::LocalArray {
        let bytes = array_bytes_per_worker
            .or(spec.array_bytes())
            .unwrap_or(0)
            .max(1);
        let cap = max_map_threads(config.memory_budget, bytes)?;
        if cap == 0 {
            return Err(Error::UnsupportedStrategy(format!(
                "{}: a {bytes}-byte local array exceeds the {}-byte memory budget",
                spec.app_id, config.memory_budget
            )));
        }
        cap
    } else {
        config.map_workers as u64
    };
    let map_workers = (config.map_workers as u64).min(max_threads) as usize;
    if map_workers < config.map_workers {
        log::warn!(
            "{}: map workers capped at {map_workers} by the memory budget",
            spec.app_id
        );
    }

    Ok(ExecutionPlan {
        container_kind,
        pipelined,
        map_style: config.map_style,
        hash_mode: config.hash_mode,
        lane_width: config.lane_width,
        max_map_threads: max_threads,
        map_workers,
        reduce_workers: config.reduce_workers,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::app::ArraySize;
    use crate::containers::CombinerKind;

    const GIB: u64 = 1 << 30;
    const MIB: u64 = 1 << 20;

    fn array_spec(combiner: CombinerKind, size: ArraySize, cells: u64) -> AppSpec {
        AppSpec {
            app_id: "t",
            container_hint: ContainerHint::Array {
                size,
                lo: 0,
                hi: cells - 1,
            },
            combiner,
        }
    }

    fn hash_spec() -> AppSpec {
        AppSpec {
            app_id: "wc",
            container_hint: ContainerHint::Hash,
            combiner: CombinerKind::SumU64,
        }
    }

    #[test]
    fn thread_cap_examples() {
        let genome = (3.7 * GIB as f64).round() as u64;
        assert_eq!(max_map_threads(8 * GIB, genome).unwrap(), 2);
        assert_eq!(max_map_threads(8 * GIB, 8 * GIB).unwrap(), 1);
        assert_eq!(max_map_threads(8 * GIB, 64 * MIB).unwrap(), 128);
        assert_eq!(max_map_threads(8 * GIB, 40 * MIB).unwrap(), 204);
        assert_eq!(max_map_threads(GIB, 2 * GIB).unwrap(), 0);
        assert!(max_map_threads(8 * GIB, 0).is_err());
    }

    #[test]
    fn large_histogram_goes_global() {
        let spec = array_spec(CombinerKind::SumU64, ArraySize::Large, 8 * MIB);
        let cfg = JobConfig::new("histogram");
        let plan = select_strategy(&cfg, &spec, Some(64 * MIB)).unwrap();
        assert_eq!(plan.container_kind, ContainerKind::GlobalAtomicArray);
        assert!(!plan.pipelined);
    }

    #[test]
    fn small_monte_carlo_stays_local() {
        let spec = array_spec(CombinerKind::SumU64, ArraySize::Small, 1024);
        let plan = select_strategy(&JobConfig::new("mc"), &spec, Some(8 * 1024)).unwrap();
        assert_eq!(plan.container_kind, ContainerKind::LocalArray);
        assert!(!plan.pipelined);
        assert_eq!(plan.max_map_threads, 8 * GIB / 8192);
    }

    #[test]
    fn word_count_hash_and_pipelined() {
        let plan = select_strategy(&JobConfig::new("wc"), &hash_spec(), None).unwrap();
        assert_eq!(plan.container_kind, ContainerKind::Hash);
        assert!(plan.pipelined);
    }

    #[test]
    fn explicit_settings_override_auto() {
        let spec = array_spec(CombinerKind::SumU64, ArraySize::Large, 8 * MIB);
        let mut cfg = JobConfig::new("histogram");
        cfg.container_mode = ContainerMode::LocalArray;
        cfg.map_workers = 16;
        let plan = select_strategy(&cfg, &spec, None).unwrap();
        assert_eq!(plan.container_kind, ContainerKind::LocalArray);
        assert_eq!(plan.map_workers, 16);

        cfg.memory_budget = 3 * 64 * MIB;
        let plan = select_strategy(&cfg, &spec, None).unwrap();
        assert_eq!(plan.max_map_threads, 3);
        assert_eq!(plan.map_workers, 3);

        let mut cfg = JobConfig::new("wc");
        cfg.pipeline_mode = PipelineMode::Off;
        assert!(!select_strategy(&cfg, &hash_spec(), None).unwrap().pipelined);
    }

    #[test]
    fn unsupported_combinations() {
        let list = array_spec(CombinerKind::AppendList, ArraySize::Large, 16);
        let mut cfg = JobConfig::new("x");
        cfg.container_mode = ContainerMode::GlobalAtomicArray;
        assert!(matches!(
            select_strategy(&cfg, &list, None),
            Err(Error::UnsupportedStrategy(_))
        ));
        assert!(select_strategy(&cfg, &hash_spec(), None).is_err());

        let spec = array_spec(CombinerKind::SumU64, ArraySize::Small, 16);
        let mut cfg = JobConfig::new("x");
        cfg.pipeline_mode = PipelineMode::On;
        assert!(select_strategy(&cfg, &spec, None).is_err());

        cfg.pipeline_mode = PipelineMode::Auto;
        cfg.container_mode = ContainerMode::LocalArray;
        cfg.memory_budget = 64;
        assert!(select_strategy(&cfg, &spec, None).is_err());
    }

    #[test]
    fn global_choice_is_monotone_in_array_size() {
        let spec = array_spec(CombinerKind::BitwiseOr, ArraySize::Large, 1);
        let cfg = JobConfig::new("bloom");
        let mut seen_global = false;
        for bytes in (0..64).map(|i| 1u64 << (i / 4 + 10)) {
            let kind = select_strategy(&cfg, &spec, Some(bytes)).unwrap().container_kind;
            if seen_global {
                assert_eq!(kind, ContainerKind::GlobalAtomicArray);
            }
            seen_global |= kind == ContainerKind::GlobalAtomicArray;
        }
        assert!(seen_global);
    }
}
