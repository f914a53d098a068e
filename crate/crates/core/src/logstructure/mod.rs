//! Log-regular pairs described by snc charts or smooth toric data, their Kato
//! fans, traces on strata and products.

mod kato;
mod pair;

pub use kato::{kato_fan_snc, kato_fan_toric, product, trace, KatoFan, KatoPoint, Realization};
pub use pair::{smooth_chart_bases, BoundaryComponent, ComponentInfo, LogChart, Mode, Pair};
