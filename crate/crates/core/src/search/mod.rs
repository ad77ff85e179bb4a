//! Discrete and continuous extremum search, Kronecker witnesses and
//! end-to-end verification of the bounds.

pub mod certify;
pub mod continuous;
pub mod scan;
pub mod verify;
pub mod witness;

pub use certify::{certify_cs_equals_ct, cosine_torus, CertificationReport, CertifyOptions};
pub use continuous::{continuous_minimum_time, continuous_minimum_torus, ContinuousMinimum, TimeOptions, TorusFunction, TorusOptions};
pub use scan::{exact_period_scan, scan_infimum, scan_spectrum, Restrict, ScanOptions, ScanResult};
pub use verify::{verify_theorem, Subject, Verdict, VerificationRecord, VerifyOptions};
pub use witness::{kronecker_witness, z_basis, WitnessReport};
