//! Per-worker emit targets used by the job engine.

use crate::app::Emit;
use crate::config::{HashMode, MapStyle};
use crate::containers::{
    flush_buffer, flush_buffer_hashed_with, BufferState, Combiner, Container, EmitBuffer, KeyRef,
    LocalHashContainer,
};
use crate::error::{Error, Result};
use crate::pipeline::{partition_and_flush, PartitionQueue};

fn row_from_keyed_app() -> Error {
    Error::InvalidArgument("keyed application emitted a map-only row".into())
}

/// Pushes the local table to the reduce queues whenever it crosses its budget.
pub(crate) struct Flusher<'q, A> {
    pub queues: &'q [PartitionQueue<A>],
    pub budget: usize,
    pub non_final_blocks: u64,
    pub final_blocks: u64,
}

impl<A> Flusher<'_, A> {
    fn maybe_flush<C: Combiner<Acc = A>>(&mut self, table: &mut LocalHashContainer<C>) -> Result<()> {
        if table.needs_flush(self.budget) {
            self.non_final_blocks += partition_and_flush(table, self.queues, false)? as u64;
        }
        Ok(())
    }
}

pub(crate) struct HashWorker<'q, C: Combiner> {
    pub table: LocalHashContainer<C>,
    buffer: Option<EmitBuffer>,
    hash_mode: HashMode,
    lanes: usize,
    pub flusher: Option<Flusher<'q, C::Acc>>,
}

impl<'q, C: Combiner> HashWorker<'q, C> {
    pub fn new(
        table: LocalHashContainer<C>,
        style: MapStyle,
        buffer_capacity: usize,
        hash_mode: HashMode,
        lanes: usize,
        flusher: Option<Flusher<'q, C::Acc>>,
    ) -> Self {
        HashWorker {
            table,
            buffer: (style == MapStyle::Buffered).then(|| EmitBuffer::new(buffer_capacity)),
            hash_mode,
            lanes,
            flusher,
        }
    }

    fn flush_buffer(&mut self) -> Result<()> {
        let HashWorker {
            table,
            buffer,
            hash_mode,
            lanes,
            flusher,
        } = self;
        let Some(buffer) = buffer else {
            return Ok(());
        };
        flush_buffer_hashed_with(buffer, table, *hash_mode, *lanes, |t| match flusher {
            Some(f) => f.maybe_flush(t),
            None => Ok(()),
        })
    }

    /// Drains the emit buffer; in pipelined mode also ships the remaining table.
    pub fn finish(&mut self) -> Result<()> {
        self.flush_buffer()?;
        if let Some(f) = &mut self.flusher {
            f.final_blocks += partition_and_flush(&mut self.table, f.queues, true)? as u64;
        }
        Ok(())
    }
}

impl<C: Combiner> Emit for HashWorker<'_, C> {
    #[inline]
    fn emit(&mut self, key: KeyRef<'_>, value: u64) -> Result<()> {
        match &mut self.buffer {
            Some(buffer) => match buffer.buffered_emit(key, value) {
                BufferState::Accepted => Ok(()),
                BufferState::Full => self.flush_buffer(),
            },
            None => {
                self.table.emit_intermediate(key, value)?;
                match &mut self.flusher {
                    Some(f) => f.maybe_flush(&mut self.table),
                    None => Ok(()),
                }
            }
        }
    }

    fn emit_row(&mut self, _row: Vec<u8>) -> Result<()> {
        Err(row_from_keyed_app())
    }
}

/// Emits into an array container or the shared atomic array.
pub(crate) struct DirectWorker<T> {
    pub target: T,
    buffer: Option<EmitBuffer>,
}

impl<T: Container> DirectWorker<T> {
    pub fn new(target: T, style: MapStyle, buffer_capacity: usize) -> Self {
        DirectWorker {
            target,
            buffer: (style == MapStyle::Buffered).then(|| EmitBuffer::new(buffer_capacity)),
        }
    }

    pub fn finish(&mut self) -> Result<()> {
        match &mut self.buffer {
            Some(buffer) => flush_buffer(buffer, &mut self.target),
            None => Ok(()),
        }
    }
}

impl<T: Container> Emit for DirectWorker<T> {
    #[inline]
    fn emit(&mut self, key: KeyRef<'_>, value: u64) -> Result<()> {
        match &mut self.buffer {
            Some(buffer) => match buffer.buffered_emit(key, value) {
                BufferState::Accepted => Ok(()),
                BufferState::Full => flush_buffer(buffer, &mut self.target),
            },
            None => self.target.emit_intermediate(key, value),
        }
    }

    fn emit_row(&mut self, _row: Vec<u8>) -> Result<()> {
        Err(row_from_keyed_app())
    }
}

/// Collects the single output row of each map-only operation.
#[derive(Default)]
pub(crate) struct RowWorker {
    pub rows: Vec<Vec<u8>>,
}

impl Emit for RowWorker {
    fn emit(&mut self, _key: KeyRef<'_>, _value: u64) -> Result<()> {
        Err(Error::InvalidArgument("map-only application emitted a keyed pair".into()))
    }

    fn emit_row(&mut self, row: Vec<u8>) -> Result<()> {
        self.rows.push(row);
        Ok(())
    }
}
