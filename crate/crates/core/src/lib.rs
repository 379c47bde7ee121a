// `!(a > b)` is used on purpose so that NaN inputs are rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod modulation;
pub mod numeric;
pub mod output;
pub mod signal;
pub mod slowvary;
pub mod stft;
pub mod tauberian;
pub mod weights;
