//! Bundled regression inputs.

pub const EXAMPLE_PAIR: &str = include_str!("../fixtures/example_pair.json");
pub const EXAMPLE_FORM: &str = include_str!("../fixtures/example_form.json");
/// The same pair with the trivial valuation on the base; the form is the
/// product of the dvf form with `dlog π`.
pub const EXAMPLE_PAIR_TRIVIAL: &str = include_str!("../fixtures/example_pair_trivial.json");
pub const EXAMPLE_FORM_TRIVIAL: &str = include_str!("../fixtures/example_form_trivial.json");

/// Three corner charts of the Dwork cubic pencil near its triangle of lines.
pub const DWORK_PAIR: &str = include_str!("../fixtures/dwork_pair.json");
pub const DWORK_FORM: &str = include_str!("../fixtures/dwork_form.json");
pub const DWORK_PAIR_DVF: &str = include_str!("../fixtures/dwork_pair_dvf.json");
pub const DWORK_FORM_DVF: &str = include_str!("../fixtures/dwork_form_dvf.json");
/// Multiplicities `b` of the special fibre, keyed by component.
pub const DWORK_SLICE: &str = include_str!("../fixtures/dwork_slice.json");

pub const A2_PAIR: &str = include_str!("../fixtures/a2_pair.json");
/// Named forms on `A²`, keyed by name.
pub const A2_FORMS: &str = include_str!("../fixtures/a2_forms.json");

pub const P2_FAN: &str = include_str!("../fixtures/p2_fan.json");
pub const P1_FAN: &str = include_str!("../fixtures/p1_fan.json");

pub const TATE_SWEEP: &str = include_str!("../fixtures/tate_sweep.json");
