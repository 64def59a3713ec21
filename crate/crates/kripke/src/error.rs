use thiserror::Error;

/// Errors shared by every module of the crate.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("world {world} is out of range for a frame of size {size}")]
    WorldOutOfRange { world: usize, size: usize },

    #[error("the frame is not transitive")]
    NotTransitive,

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("unknown property `{0}`")]
    UnknownProperty(String),

    #[error("map has length {got} but the domain has {expected} worlds")]
    MapLength { expected: usize, got: usize },

    #[error("stability fails on the edge {from} -> {to}")]
    Stability { from: usize, to: usize },

    #[error("openness fails at world {world}: successor {target} of its image has no preimage above it")]
    Openness { world: usize, target: usize },

    #[error("search budget exceeded while {0}")]
    BudgetExceeded(String),

    #[error("parse error at byte {offset}: {message}")]
    Parse { offset: usize, message: String },

    #[error("unsupported logic: {0}")]
    UnsupportedLogic(String),

    #[error("invalid category: {0}")]
    InvalidCategory(String),

    #[error("invalid presheaf: {0}")]
    InvalidPresheaf(String),
}

pub type Result<T> = std::result::Result<T, Error>;

/// Upper bound on the number of steps an exhaustive search may take.
///
/// Exceeding it yields [`Error::BudgetExceeded`], never a silent negative answer.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget {
    pub max_steps: u64,
}

impl Budget {
    pub const fn new(max_steps: u64) -> Self {
        Budget { max_steps }
    }

    pub const fn unlimited() -> Self {
        Budget { max_steps: u64::MAX }
    }

    pub(crate) fn meter(self, task: &'static str) -> Meter {
        Meter { left: self.max_steps, task }
    }
}

impl Default for Budget {
    fn default() -> Self {
        Budget { max_steps: 1_000_000 }
    }
}

pub(crate) struct Meter {
    left: u64,
    task: &'static str,
}

impl Meter {
    #[inline]
    pub(crate) fn tick(&mut self) -> Result<()> {
        self.charge(1)
    }

    #[inline]
    pub(crate) fn charge(&mut self, steps: u64) -> Result<()> {
        if self.left < steps {
            return Err(Error::BudgetExceeded(self.task.to_string()));
        }
        self.left -= steps;
        Ok(())
    }
}
