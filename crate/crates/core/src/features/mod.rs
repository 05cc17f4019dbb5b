//! Texture descriptors: uniform LBP code maps and Gabor bank magnitudes.

mod gabor;
mod lbp;

pub use gabor::{
    convolve_same, gabor_bank, gabor_feature, gabor_kernel, gabor_value, GaborBank, GaborBankConfig,
    GaborBankResponse, GaborMagnitude, GaborParams, Kernel, BANK_ORIENTATIONS_DEG, BANK_SIZE,
    BANK_WAVELENGTHS,
};
pub use lbp::{
    lbp_code, lbp_feature, lbp_map, transitions, uniform_label, LbpCode, LbpConfig, LbpMap,
    NEIGHBOR_OFFSETS, NON_UNIFORM,
};
