//! Score matrices and the per-cell term decomposition captured while decoding.

use alloc::vec::Vec;

use super::Variant;
use crate::corpus::{IngredientState, Tag, NUM_STATES};
use crate::error::Error;
use crate::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TermKind {
    Initial,
    Transition,
    Lexical,
}

/// Random variable a binding assigns, relative to the term's own position `r`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variable {
    /// Γ_r
    State,
    /// Γ_{r-1}
    PrevState,
    /// Γ_{r-2}
    PrevState2,
    /// T_r
    Tag,
    /// T_{r-1}
    PrevTag,
}

impl Variable {
    pub fn label(self) -> &'static str {
        match self {
            Variable::State => "Γr",
            Variable::PrevState => "Γr-1",
            Variable::PrevState2 => "Γr-2",
            Variable::Tag => "Tr",
            Variable::PrevTag => "Tr-1",
        }
    }
}

/// Where a bound value came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Origin {
    /// One of the cell's own assumed coordinates.
    Hypothesis,
    /// Picked by the inner max of the recurrence.
    ArgmaxSelected,
    /// Fixed by the decoder's structure, e.g. a first-layer tag.
    Structural,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Value {
    State(IngredientState),
    Tag(Tag),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Binding {
    pub variable: Variable,
    /// Absolute token position the value is asserted for.
    pub position: usize,
    pub value: Value,
    pub origin: Origin,
}

/// One summand of a cell score.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoredTerm {
    pub kind: TermKind,
    /// Token position `r` the term is evaluated at.
    pub position: usize,
    /// Raw log-probability, before `weight`.
    pub log_value: f64,
    /// Multiplier applied in the cell sum (λ for double-agent lexical terms).
    pub weight: f64,
    /// Lexical term read from the unknown-word prefix table.
    pub from_prefix: bool,
    pub bindings: Vec<Binding>,
}

impl ScoredTerm {
    pub fn weighted(&self) -> f64 {
        self.weight * self.log_value
    }
}

/// Coordinates of one matrix cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct Cell {
    pub position: usize,
    pub row: usize,
    pub col: usize,
}

/// δ and ψ for every position, stored as `len × rows × cols`.
///
/// Rows are the previous state for the second-order decoder, the POS tag for
/// the double-agent decoders and a single row for the first-order decoder.
#[derive(Debug, Clone, PartialEq)]
pub struct StateMatrix {
    len: usize,
    rows: usize,
    delta: Vec<f64>,
    psi: Vec<u8>,
}

impl StateMatrix {
    pub(crate) fn new(len: usize, rows: usize) -> StateMatrix {
        let n = len * rows * NUM_STATES;
        StateMatrix { len, rows, delta: alloc::vec![0.0; n], psi: alloc::vec![0; n] }
    }

    #[inline]
    fn idx(&self, position: usize, row: usize, col: usize) -> usize {
        debug_assert!(position < self.len && row < self.rows && col < NUM_STATES);
        (position * self.rows + row) * NUM_STATES + col
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        NUM_STATES
    }

    pub fn contains(&self, cell: Cell) -> bool {
        cell.position < self.len && cell.row < self.rows && cell.col < NUM_STATES
    }

    #[inline]
    pub fn delta(&self, position: usize, row: usize, col: usize) -> f64 {
        self.delta[self.idx(position, row, col)]
    }

    /// Backpointer: the state index selected at the previous position
    /// (two positions back for the second-order decoder).
    #[inline]
    pub fn psi(&self, position: usize, row: usize, col: usize) -> usize {
        self.psi[self.idx(position, row, col)] as usize
    }

    #[inline]
    pub(crate) fn set(&mut self, position: usize, row: usize, col: usize, delta: f64, psi: usize) {
        let i = self.idx(position, row, col);
        self.delta[i] = delta;
        self.psi[i] = psi as u8;
    }

    /// Flat row-major view of one position's δ block.
    pub fn delta_block(&self, position: usize) -> &[f64] {
        let w = self.rows * NUM_STATES;
        &self.delta[position * w..(position + 1) * w]
    }
}

/// Everything a decode produced.
#[derive(Debug, Clone, PartialEq)]
pub struct DecodeTrace {
    pub variant: Variant,
    pub matrix: StateMatrix,
    pub(crate) terms: Vec<Vec<ScoredTerm>>,
    pub path: Vec<IngredientState>,
    /// Matrix row read at each position along the chosen path.
    pub path_rows: Vec<usize>,
    pub score: f64,
    /// First-layer tags the double-agent decoders consumed.
    pub tags: Option<Vec<Tag>>,
}

impl DecodeTrace {
    pub fn len(&self) -> usize {
        self.path.len()
    }

    pub fn is_empty(&self) -> bool {
        self.path.is_empty()
    }

    pub fn cell_terms(&self, cell: Cell) -> Result<&[ScoredTerm]> {
        if !self.matrix.contains(cell) {
            return Err(Error::InvalidCell);
        }
        Ok(&self.terms[self.matrix.idx(cell.position, cell.row, cell.col)])
    }

    pub fn delta(&self, cell: Cell) -> f64 {
        self.matrix.delta(cell.position, cell.row, cell.col)
    }

    pub fn path_cells(&self) -> Vec<Cell> {
        self.path
            .iter()
            .zip(&self.path_rows)
            .enumerate()
            .map(|(position, (s, &row))| Cell { position, row, col: s.index() })
            .collect()
    }

    /// Terms of every cell the chosen path passes through.
    pub fn path_terms(&self) -> impl Iterator<Item = &ScoredTerm> + '_ {
        self.path_cells().into_iter().flat_map(move |c| {
            self.terms[self.matrix.idx(c.position, c.row, c.col)].iter()
        })
    }

    /// Sum of weighted path terms; equals [`DecodeTrace::score`] up to rounding.
    pub fn rescore(&self) -> f64 {
        self.path_terms().map(ScoredTerm::weighted).sum()
    }

    /// Cells competing at `position`, in storage order.
    ///
    /// Double-agent decoders only read the row of the first-layer tag, so
    /// only that row competes; the other decoders expose every cell.
    pub fn candidate_cells(&self, position: usize) -> Vec<Cell> {
        let rows: Vec<usize> = match (&self.tags, self.variant.is_double()) {
            (Some(tags), true) => alloc::vec![tags[position].index()],
            _ => (0..self.matrix.rows()).collect(),
        };
        rows.into_iter()
            .flat_map(|row| (0..NUM_STATES).map(move |col| Cell { position, row, col }))
            .collect()
    }

    /// The `k` highest-δ candidate cells at `position`; ties keep the lower
    /// (row, col). `k` beyond the candidate count returns all of them.
    pub fn top_cells(&self, position: usize, k: usize) -> Result<Vec<Cell>> {
        if position >= self.len() {
            return Err(Error::PositionOutOfRange { position, len: self.len() });
        }
        let mut cells = self.candidate_cells(position);
        cells.sort_by(|a, b| self.delta(*b).total_cmp(&self.delta(*a)).then(a.cmp(b)));
        cells.truncate(k);
        Ok(cells)
    }

    /// States of the partial path ending in `cell`, reconstructed through ψ.
    pub fn partial_path(&self, cell: Cell) -> Result<Vec<IngredientState>> {
        if !self.matrix.contains(cell) {
            return Err(Error::InvalidCell);
        }
        let p = cell.position;
        let mut states = alloc::vec![IngredientState::OUTSIDE; p + 1];
        states[p] = IngredientState::from_index(cell.col);
        match self.variant {
            Variant::MonoFirst => {
                for q in (1..=p).rev() {
                    let prev = self.matrix.psi(q, 0, states[q].index());
                    states[q - 1] = IngredientState::from_index(prev);
                }
            }
            Variant::MonoSecond => {
                if p >= 1 {
                    states[p - 1] = IngredientState::from_index(cell.row);
                }
                for q in (2..=p).rev() {
                    let prev2 = self.matrix.psi(q, states[q - 1].index(), states[q].index());
                    states[q - 2] = IngredientState::from_index(prev2);
                }
            }
            Variant::DoubleSimple | Variant::DoubleTransfer => {
                let tags = self.tags.as_ref().ok_or(Error::InvalidCell)?;
                for q in (1..=p).rev() {
                    let row = if q == p { cell.row } else { tags[q].index() };
                    let prev = self.matrix.psi(q, row, states[q].index());
                    states[q - 1] = IngredientState::from_index(prev);
                }
            }
        }
        Ok(states)
    }
}
