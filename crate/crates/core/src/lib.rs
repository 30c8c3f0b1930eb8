//! q-characters of finite-dimensional modules of the quantum affine algebra
//! of type G2, the m-system and its dual, and the G2 cluster algebra whose
//! mutations realise them.

pub mod cluster;
pub mod coeff;
pub mod error;
pub mod fm;
pub mod identity;
pub mod minaff;
pub mod monomial;
pub mod sl2;
mod text;
pub mod zp_ring;

pub use coeff::Int;
pub use error::{Error, Result};
pub use fm::{fm_qcharacter, validate_character, Caps, QCharCache, Validation};
pub use monomial::{a_inverse, a_monomial, Monomial, Node};
pub use sl2::{Sl2, Sl2Monomial, Sl2Polynomial, Str};
pub use text::{parse_monomial, parse_polynomial, parse_sl2_monomial, MAX_SHIFT};
pub use zp_ring::{QPolynomial, WeightPolynomial};
pub use minaff::{EquationInstance, Family, Kind, ModuleLabel};
