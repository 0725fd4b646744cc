//! Integer and polynomial arithmetic: sieving, multiplicative functions,
//! primality beyond the sieve, integer polynomials and their reductions mod p.

pub mod modp;
pub mod multiplicative;
pub mod poly;
pub mod primality;
pub mod sieve;

pub use modp::{mod_p_gcd, ModPPolynomial};
pub use multiplicative::{euler_phi, factorize, mobius, primorial};
pub use poly::{parse_poly, parse_polys, IntPolynomial};
pub use primality::{is_prime_big, is_prime_u64};
pub use sieve::PrimeTable;
