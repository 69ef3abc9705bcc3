use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("word length {wl} is not supported: {reason}")]
    WordLength { wl: u32, reason: &'static str },

    #[error("{name} = {value} is out of range (allowed 0..={max})")]
    Parameter {
        name: &'static str,
        value: u32,
        max: u32,
    },

    #[error("operand {value} does not fit in {wl}-bit {signedness} range")]
    Operand {
        value: i64,
        wl: u32,
        signedness: &'static str,
    },

    #[error(
        "exhaustive sweep needs {required} input vectors but the budget is {budget}; \
         use a sampled sweep instead"
    )]
    BudgetExceeded { required: u128, budget: u128 },

    #[error("sample {index} = {value} overflows the Q1.{frac_bits} input range")]
    FixedPointOverflow {
        index: usize,
        value: f64,
        frac_bits: u32,
    },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("coefficient file: {0}")]
    Coefficients(String),
}
