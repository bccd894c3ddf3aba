//! Catalog of isotropic hyperelastic energies.
//!
//! Every model evaluates through two channels:
//!
//! * the invariant form `W(I1, I2, I3)` over [`Jet2`] inputs, and
//! * the principal form `W(λ1, λ2, λ3)` over the eigenvalues of `B`, which
//!   along simple shear gives the deformation-gradient channel.
//!
//! Models whose closed form lives in principal stretches (Hencky and
//! exp-Hencky) obtain their invariant form from a contour-integral spectral
//! sum, see [`crate::spectral`].

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::diff::Jet2;
use crate::error::{Error, Result};
use crate::expr::{self, Expr, ParamTable};
use crate::kinematics::simple_shear_eigenvalues;
use crate::spectral::spectral_sum;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Compressibility {
    Compressible,
    /// Meaningful only on `I3 = 1`; derivatives in `I3` are not used.
    IncompressibleOnly,
}

/// How the invariant form of a model is obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InvariantChannel {
    Closed,
    /// Computed from the principal form by a spectral sum.
    Spectral,
}

#[derive(Debug, Clone)]
pub enum EnergyKind {
    NeoHooke,
    MooneyRivlin,
    BlatzKo,
    VerondaWestman,
    MihaiNeff,
    Knowles,
    Bazant,
    Ciarlet,
    Svk,
    FourthOrder,
    Hencky,
    ExpHencky,
    MartinNeff,
    Model,
    Pucci,
    Dsl(Arc<Expr>),
    /// `base + κ/2 (√I3 − 1)²`.
    Penalized { base: Box<EnergyModel>, kappa: f64 },
    Scaled { base: Box<EnergyModel>, factor: f64 },
}

/// A named energy with its parameters.
#[derive(Debug, Clone)]
pub struct EnergyModel {
    name: String,
    kind: EnergyKind,
    params: ParamTable,
    compressibility: Compressibility,
}

struct Builtin {
    name: &'static str,
    defaults: &'static [(&'static str, f64)],
    compressibility: Compressibility,
    make: fn() -> EnergyKind,
}

const MU_THIRD: f64 = 1.0 / 3.0;

const BUILTINS: &[Builtin] = &[
    Builtin {
        name: "neo-hooke",
        defaults: &[("mu", 1.0), ("kappa", 1.0)],
        compressibility: Compressibility::Compressible,
        make: || EnergyKind::NeoHooke,
    },
    Builtin {
        name: "mooney-rivlin",
        defaults: &[("mu", 1.0), ("alpha", 0.5), ("kappa", 1.0)],
        compressibility: Compressibility::Compressible,
        make: || EnergyKind::MooneyRivlin,
    },
    Builtin {
        name: "blatz-ko",
        defaults: &[("mu", 1.0)],
        compressibility: Compressibility::Compressible,
        make: || EnergyKind::BlatzKo,
    },
    Builtin {
        name: "veronda-westman",
        defaults: &[("mu", 1.0), ("gamma", 1.0), ("kappa", 1.0)],
        compressibility: Compressibility::Compressible,
        make: || EnergyKind::VerondaWestman,
    },
    Builtin {
        name: "mihai-neff",
        defaults: &[("mu", 1.0), ("mu_tilde", MU_THIRD), ("kappa", 1.0)],
        compressibility: Compressibility::Compressible,
        make: || EnergyKind::MihaiNeff,
    },
    Builtin {
        name: "knowles",
        defaults: &[("mu", 1.0), ("b", 1.0), ("n", 1.0), ("D1", 2.0)],
        compressibility: Compressibility::Compressible,
        make: || EnergyKind::Knowles,
    },
    Builtin {
        name: "bazant",
        defaults: &[],
        compressibility: Compressibility::Compressible,
        make: || EnergyKind::Bazant,
    },
    Builtin {
        name: "ciarlet",
        defaults: &[("c1", 1.0), ("c2", 1.0), ("kappa", 1.0)],
        compressibility: Compressibility::Compressible,
        make: || EnergyKind::Ciarlet,
    },
    Builtin {
        name: "svk",
        defaults: &[("mu", 1.0), ("lambda", 1.0)],
        compressibility: Compressibility::IncompressibleOnly,
        make: || EnergyKind::Svk,
    },
    Builtin {
        name: "fourth-order",
        defaults: &[("mu", 1.0), ("A", 1.0), ("D", 1.0)],
        compressibility: Compressibility::IncompressibleOnly,
        make: || EnergyKind::FourthOrder,
    },
    Builtin {
        name: "hencky",
        defaults: &[("mu", 1.0), ("kappa", 1.0)],
        compressibility: Compressibility::Compressible,
        make: || EnergyKind::Hencky,
    },
    Builtin {
        name: "exp-hencky",
        defaults: &[("mu", 1.0), ("kappa", 1.0), ("k", 1.0), ("khat", 1.0)],
        compressibility: Compressibility::Compressible,
        make: || EnergyKind::ExpHencky,
    },
    Builtin {
        name: "martin-neff",
        defaults: &[],
        compressibility: Compressibility::Compressible,
        make: || EnergyKind::MartinNeff,
    },
    Builtin {
        name: "model",
        defaults: &[("c1", 1.0)],
        compressibility: Compressibility::Compressible,
        make: || EnergyKind::Model,
    },
    Builtin {
        name: "pucci",
        defaults: &[("mu", 1.0), ("alpha", 0.95)],
        compressibility: Compressibility::Compressible,
        make: || EnergyKind::Pucci,
    },
];

/// Kebab-case names accepted by [`EnergyModel::by_name`].
pub fn builtin_names() -> Vec<&'static str> {
    BUILTINS.iter().map(|b| b.name).collect()
}

fn range_err(name: &str, value: f64, reason: &'static str) -> Error {
    Error::ParameterRange {
        name: name.to_string(),
        value,
        reason,
    }
}

fn require_positive_i3(i3: &Jet2) -> Result<()> {
    if i3.value() > 0.0 {
        Ok(())
    } else {
        Err(Error::Domain {
            op: "det",
            value: i3.value(),
        })
    }
}

/// `κ/2 (√I3 − 1)²`
/// `asinh(√x / 2)²`, analytic in `x ≥ 0`.
fn asinh_sq_half_sqrt(x: Jet2) -> Result<Jet2> {
    let v = x.value();
    if !(v >= 0.0) {
        return Err(Error::Domain { op: "asinh", value: v });
    }
    if v < 0.5 {
        // ½ Σ (−1)^{n+1} xⁿ / (n² C(2n, n))
        const TERMS: usize = 40;
        let mut coef = [0.0; TERMS + 1];
        let mut binom = 1.0;
        for n in 1..=TERMS {
            let nf = n as f64;
            binom *= (2.0 * nf) * (2.0 * nf - 1.0) / (nf * nf);
            let sign = if n % 2 == 1 { 1.0 } else { -1.0 };
            coef[n] = 0.5 * sign / (nf * nf * binom);
        }
        let mut acc = Jet2::constant(coef[TERMS]);
        for c in coef[..TERMS].iter().rev() {
            acc = acc * x + *c;
        }
        return Ok(acc);
    }
    let s = x.try_sqrt()?.scale(0.5);
    let a = (s + (s * s + 1.0).try_sqrt()?).try_ln()?;
    Ok(a * a)
}

fn volumetric(kappa: f64, i3: &Jet2) -> Result<Jet2> {
    if kappa == 0.0 {
        return Ok(Jet2::constant(0.0));
    }
    let d = i3.try_sqrt()? - 1.0;
    Ok((d * d).scale(0.5 * kappa))
}

fn sum3(v: &[Jet2; 3]) -> Jet2 {
    v[0] + v[1] + v[2]
}

/// Invariants from the eigenvalues of `B`.
pub fn invariants_from_eigenvalues(l: &[Jet2; 3]) -> [Jet2; 3] {
    [
        sum3(l),
        l[0] * l[1] + l[1] * l[2] + l[0] * l[2],
        l[0] * l[1] * l[2],
    ]
}

fn log_squared(z: Complex64) -> (Complex64, Complex64) {
    let l = z.ln();
    (l * l, 2.0 * l / z)
}

impl EnergyModel {
    /// A catalog model with its default parameters.
    pub fn by_name(name: &str) -> Result<EnergyModel> {
        let b = BUILTINS.iter().find(|b| b.name == name).ok_or_else(|| {
            Error::InvalidArgument(format!(
                "unknown model `{name}`; known models: {}",
                builtin_names().join(", ")
            ))
        })?;
        let params = ParamTable::from_pairs(b.defaults.iter().copied())?;
        Ok(EnergyModel {
            name: b.name.to_string(),
            kind: (b.make)(),
            params,
            compressibility: b.compressibility,
        })
    }

    /// A user energy given as an expression in `I1`, `I2`, `I3`.
    pub fn from_dsl(
        name: &str,
        source: &str,
        params: ParamTable,
        compressibility: Compressibility,
    ) -> Result<EnergyModel> {
        let ast = expr::parse(source)?;
        for p in ast.parameters() {
            if params.get(&p).is_none() {
                return Err(Error::UnboundParameter(p));
            }
        }
        Ok(EnergyModel {
            name: name.to_string(),
            kind: EnergyKind::Dsl(Arc::new(ast)),
            params,
            compressibility,
        })
    }

    /// `base + κ/2 (√I3 − 1)²`.
    pub fn penalized(base: EnergyModel, kappa: f64) -> Result<EnergyModel> {
        if !(kappa >= 0.0) {
            return Err(range_err("kappa", kappa, "must be non-negative"));
        }
        Ok(EnergyModel {
            name: format!("{}+penalty", base.name),
            compressibility: Compressibility::Compressible,
            params: ParamTable::new(),
            kind: EnergyKind::Penalized {
                base: Box::new(base),
                kappa,
            },
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn kind(&self) -> &EnergyKind {
        &self.kind
    }

    pub fn params(&self) -> &ParamTable {
        &self.params
    }

    pub fn compressibility(&self) -> Compressibility {
        self.compressibility
    }

    pub fn is_compressible(&self) -> bool {
        self.compressibility == Compressibility::Compressible
    }

    pub fn invariant_channel(&self) -> InvariantChannel {
        match &self.kind {
            EnergyKind::Hencky | EnergyKind::ExpHencky => InvariantChannel::Spectral,
            EnergyKind::Penalized { base, .. } | EnergyKind::Scaled { base, .. } => {
                base.invariant_channel()
            }
            _ => InvariantChannel::Closed,
        }
    }

    /// Whether the principal form is implemented independently of the
    /// invariant form.
    pub fn has_native_principal_form(&self) -> bool {
        match &self.kind {
            EnergyKind::Bazant
            | EnergyKind::Svk
            | EnergyKind::FourthOrder
            | EnergyKind::Hencky
            | EnergyKind::ExpHencky
            | EnergyKind::MartinNeff => true,
            EnergyKind::Penalized { base, .. } | EnergyKind::Scaled { base, .. } => {
                base.has_native_principal_form()
            }
            _ => false,
        }
    }

    pub fn param(&self, name: &str) -> Option<f64> {
        self.params.get(name)
    }

    fn p(&self, name: &str) -> f64 {
        self.params.value(name)
    }

    /// Returns a copy with one parameter changed. Catalog models only accept
    /// their own parameter names.
    pub fn with_param(mut self, name: &str, value: f64) -> Result<EnergyModel> {
        let known = self.params.get(name).is_some();
        match &self.kind {
            EnergyKind::Dsl(_) => {}
            _ if !known => {
                return Err(Error::InvalidArgument(format!(
                    "model `{}` has no parameter `{name}`",
                    self.name
                )))
            }
            _ => {}
        }
        self.params.set(name, value)?;
        self.validate()?;
        Ok(self)
    }

    /// `c·W`.
    pub fn scaled(self, c: f64) -> Result<EnergyModel> {
        if !(c > 0.0) {
            return Err(range_err("factor", c, "must be positive"));
        }
        Ok(EnergyModel {
            name: format!("{}*{c}", self.name),
            compressibility: self.compressibility,
            params: ParamTable::new(),
            kind: EnergyKind::Scaled {
                base: Box::new(self),
                factor: c,
            },
        })
    }

    /// Checks parameter ranges.
    pub fn validate(&self) -> Result<()> {
        let pos = |name: &str| -> Result<()> {
            let v = self.p(name);
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(range_err(name, v, "must be positive"))
            }
        };
        let nonneg = |name: &str| -> Result<()> {
            let v = self.p(name);
            if v >= 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(range_err(name, v, "must be non-negative"))
            }
        };
        match &self.kind {
            EnergyKind::NeoHooke | EnergyKind::BlatzKo | EnergyKind::Hencky => {
                pos("mu")?;
                if self.params.get("kappa").is_some() {
                    nonneg("kappa")?;
                }
            }
            EnergyKind::MooneyRivlin => {
                pos("mu")?;
                nonneg("kappa")?;
                let a = self.p("alpha");
                if !(0.0..=1.0).contains(&a) {
                    return Err(range_err("alpha", a, "must lie in [0, 1]"));
                }
            }
            EnergyKind::VerondaWestman => {
                pos("mu")?;
                nonneg("kappa")?;
                if self.p("gamma") == 0.0 {
                    return Err(range_err("gamma", 0.0, "must be non-zero"));
                }
            }
            EnergyKind::MihaiNeff => {
                pos("mu")?;
                nonneg("mu_tilde")?;
                nonneg("kappa")?;
            }
            EnergyKind::Knowles => {
                pos("mu")?;
                pos("D1")?;
                for n in ["b", "n"] {
                    if self.p(n) == 0.0 {
                        return Err(range_err(n, 0.0, "must be non-zero"));
                    }
                }
            }
            EnergyKind::Ciarlet => {
                nonneg("c1")?;
                nonneg("c2")?;
                nonneg("kappa")?;
                if self.p("c1") + self.p("c2") <= 0.0 {
                    return Err(range_err("c1", self.p("c1"), "c1 + c2 must be positive"));
                }
            }
            EnergyKind::Svk => {
                pos("mu")?;
                nonneg("lambda")?;
            }
            EnergyKind::FourthOrder => pos("mu")?,
            EnergyKind::ExpHencky => {
                pos("mu")?;
                nonneg("kappa")?;
                pos("k")?;
                pos("khat")?;
            }
            EnergyKind::Model => pos("c1")?,
            EnergyKind::Pucci => {
                pos("mu")?;
                let a = self.p("alpha");
                if !(a > 0.0 && a < 1.0) {
                    return Err(range_err("alpha", a, "must lie in (0, 1)"));
                }
            }
            EnergyKind::Bazant | EnergyKind::MartinNeff | EnergyKind::Dsl(_) => {}
            EnergyKind::Penalized { base, .. } | EnergyKind::Scaled { base, .. } => {
                base.validate()?
            }
        }
        Ok(())
    }

    /// Invariant form over jets.
    pub fn eval_invariants(&self, inv: &[Jet2; 3]) -> Result<Jet2> {
        let [i1, i2, i3] = *inv;
        let p = |n: &str| self.p(n);
        let iso1 = || -> Result<Jet2> {
            require_positive_i3(&i3)?;
            Ok(i1 * i3.powf(-1.0 / 3.0) - 3.0)
        };
        let w = match &self.kind {
            EnergyKind::NeoHooke => iso1()?.scale(0.5 * p("mu")) + volumetric(p("kappa"), &i3)?,
            EnergyKind::MooneyRivlin => {
                let a = p("alpha");
                let iso2 = i2 * i3.powf(-2.0 / 3.0) - 3.0;
                iso1()?.mix(a, &iso2, 1.0 - a).scale(0.5 * p("mu")) + volumetric(p("kappa"), &i3)?
            }
            EnergyKind::BlatzKo => {
                require_positive_i3(&i3)?;
                (i1 + i3.sqrt().recip() * 2.0 - 5.0).scale(0.5 * p("mu"))
            }
            EnergyKind::VerondaWestman => {
                let g = p("gamma");
                let e = ((i1 - 3.0).scale(g)).try_exp()? - 1.0;
                (e.scale(1.0 / g) - (i2 - 3.0).scale(0.5)).scale(p("mu"))
                    + volumetric(p("kappa"), &i3)?
            }
            EnergyKind::MihaiNeff => {
                let d = i1 - 3.0;
                iso1()?.scale(0.5 * p("mu"))
                    + (d * d).scale(0.25 * p("mu_tilde"))
                    + volumetric(p("kappa"), &i3)?
            }
            EnergyKind::Knowles => {
                let (b, n) = (p("b"), p("n"));
                let base = iso1()?.scale(b / n) + 1.0;
                let pw = base.try_pow(&Jet2::constant(n))?;
                (pw - 1.0).scale(p("mu") / (2.0 * b)) + volumetric(2.0 / p("D1"), &i3)?
            }
            EnergyKind::Bazant => {
                require_positive_i3(&i3)?;
                let tr_b2 = i1 * i1 - i2.scale(2.0);
                let tr_binv2 = (i2 * i2 - (i1 * i3).scale(2.0)) * (i3 * i3).recip();
                tr_b2 + tr_binv2 - 6.0
            }
            EnergyKind::Ciarlet => {
                let (c1, c2) = (p("c1"), p("c2"));
                i1.mix(0.5 * c1, &i2, 0.5 * c2) - 1.5 * (c1 + c2) + volumetric(p("kappa"), &i3)?
            }
            EnergyKind::Svk => {
                let norm = i1 * i1 - i2.scale(2.0) - i1.scale(2.0) + 3.0;
                let tr = i1 - 3.0;
                norm.scale(0.25 * p("mu")) + (tr * tr).scale(p("lambda") / 8.0)
            }
            EnergyKind::FourthOrder => {
                let tr_e2 = (i1 * i1 - i2.scale(2.0) - i1.scale(2.0) + 3.0).scale(0.25);
                let tr_e3 = (i1 * i1 * i1 - (i1 * i2).scale(3.0) + i3.scale(3.0)
                    - (i1 * i1).scale(3.0)
                    + i2.scale(6.0)
                    + i1.scale(3.0)
                    - 3.0)
                    .scale(0.125);
                tr_e2.scale(p("mu")) + tr_e3.scale(0.5 * p("A")) + (tr_e2 * tr_e2).scale(p("D"))
            }
            EnergyKind::Hencky | EnergyKind::ExpHencky => self.eval_spectral(inv)?,
            EnergyKind::MartinNeff => {
                require_positive_i3(&i3)?;
                if !(i1.value() > 0.0 && i2.value() > 0.0) {
                    return Err(Error::Domain {
                        op: "pow",
                        value: i1.value().min(i2.value()),
                    });
                }
                i1.powf(1.5) * i3.powf(-0.5) + i2.powf(1.5) * i3.recip() - 6.0 * 3f64.sqrt()
            }
            EnergyKind::Model => {
                require_positive_i3(&i3)?;
                (i1.try_sqrt()? + i2.try_sqrt()? + i3.sqrt().recip() * 3f64.sqrt()
                    - 3.0 * 3f64.sqrt())
                .scale(p("c1"))
            }
            EnergyKind::Pucci => {
                require_positive_i3(&i3)?;
                let (mu, a) = (p("mu"), p("alpha"));
                let logs = i1.try_ln()? + i2.try_ln()? - i3.ln() - 2.0 * 3f64.ln();
                let bk = i1 + i3.sqrt().recip() * 2.0 - 5.0;
                logs.scale(0.75 * mu * a) + bk.scale(0.5 * mu * (1.0 - a))
            }
            EnergyKind::Dsl(ast) => ast.eval(inv, &self.params)?,
            EnergyKind::Penalized { base, kappa } => {
                base.eval_invariants(inv)? + volumetric(*kappa, &i3)?
            }
            EnergyKind::Scaled { base, factor } => base.eval_invariants(inv)?.scale(*factor),
        };
        Ok(w)
    }

    /// Hencky-type energies through `S = Σ (ln λ_k)²`.
    fn eval_spectral(&self, inv: &[Jet2; 3]) -> Result<Jet2> {
        let x = inv.map(|j| j.value());
        let (v, g, h) = spectral_sum(x, log_squared)?;
        let s = Jet2::compose(v, g, h, inv);
        let l = inv[2].try_ln()?;
        let dev = s.scale(0.25) - (l * l).scale(1.0 / 12.0);
        let vol = (l * l).scale(0.25);
        self.hencky_from_parts(dev, vol)
    }

    /// Combines `‖dev log V‖²` and `(tr log V)²`.
    fn hencky_from_parts(&self, dev: Jet2, vol: Jet2) -> Result<Jet2> {
        let (mu, kappa) = (self.p("mu"), self.p("kappa"));
        match self.kind {
            EnergyKind::Hencky => Ok(dev.scale(mu) + vol.scale(0.5 * kappa)),
            EnergyKind::ExpHencky => {
                let (k, kh) = (self.p("k"), self.p("khat"));
                let a = (dev.scale(k).try_exp()? - 1.0).scale(mu / k);
                let b = (vol.scale(kh).try_exp()? - 1.0).scale(kappa / (2.0 * kh));
                Ok(a + b)
            }
            _ => unreachable!("not a Hencky-type model"),
        }
    }

    /// Plain value of the invariant form.
    pub fn energy(&self, inv: [f64; 3]) -> Result<f64> {
        let j = inv.map(Jet2::constant);
        Ok(self.eval_invariants(&j)?.value())
    }

    /// Value, gradient and Hessian with respect to the invariants.
    pub fn invariant_jet(&self, inv: [f64; 3]) -> Result<Jet2> {
        let seeds = crate::diff::seed(inv, 3)?;
        self.eval_invariants(&seeds)
    }

    /// Principal form over the eigenvalues of `B` (squared stretches).
    pub fn eval_principal(&self, l: &[Jet2; 3]) -> Result<Jet2> {
        for x in l {
            if !(x.value() > 0.0) {
                return Err(Error::Domain {
                    op: "stretch",
                    value: x.value(),
                });
            }
        }
        let p = |n: &str| self.p(n);
        match &self.kind {
            EnergyKind::Bazant => {
                let mut w = Jet2::constant(0.0);
                for x in l {
                    let d = *x - x.recip();
                    w += d * d;
                }
                Ok(w)
            }
            EnergyKind::Svk => {
                let d = l.map(|x| x - 1.0);
                let sq = d[0] * d[0] + d[1] * d[1] + d[2] * d[2];
                let tr = sum3(&d);
                Ok(sq.scale(0.25 * p("mu")) + (tr * tr).scale(p("lambda") / 8.0))
            }
            EnergyKind::FourthOrder => {
                let e = l.map(|x| (x - 1.0).scale(0.5));
                let e2 = e[0] * e[0] + e[1] * e[1] + e[2] * e[2];
                let e3 = e[0] * e[0] * e[0] + e[1] * e[1] * e[1] + e[2] * e[2] * e[2];
                Ok(e2.scale(p("mu")) + e3.scale(0.5 * p("A")) + (e2 * e2).scale(p("D")))
            }
            EnergyKind::Hencky | EnergyKind::ExpHencky => {
                let lg = l.map(|x| x.ln().scale(0.5));
                let tr = sum3(&lg);
                let sq = lg[0] * lg[0] + lg[1] * lg[1] + lg[2] * lg[2];
                let dev = sq - (tr * tr).scale(1.0 / 3.0);
                self.hencky_from_parts(dev, tr * tr)
            }
            EnergyKind::MartinNeff => {
                let det = (l[0] * l[1] * l[2]).sqrt();
                let f2 = sum3(l);
                let finv2 = l[0].recip() + l[1].recip() + l[2].recip();
                Ok(f2.powf(1.5) * det.recip() + det * finv2.powf(1.5) - 6.0 * 3f64.sqrt())
            }
            EnergyKind::Penalized { base, kappa } if base.has_native_principal_form() => {
                Ok(base.eval_principal(l)? + volumetric(*kappa, &(l[0] * l[1] * l[2]))?)
            }
            EnergyKind::Scaled { base, factor } if base.has_native_principal_form() => {
                Ok(base.eval_principal(l)?.scale(*factor))
            }
            _ => self.eval_invariants(&invariants_from_eigenvalues(l)),
        }
    }

    /// Deformation-gradient channel along simple shear with amount `gamma`.
    pub fn eval_shear(&self, gamma: Jet2) -> Result<Jet2> {
        let (a, b, c) = simple_shear_eigenvalues(gamma);
        self.eval_principal(&[a, b, c])
    }

    /// `W(3+R², 3+R², 1)` as a one-variable jet in `R`.
    pub fn path_jet(&self, r: f64) -> Result<Jet2> {
        let rr = Jet2::variable(r, 0, 1);
        self.on_shear_path(rr * rr)
    }

    /// `g(x) = W(3+x, 3+x, 1)` as a one-variable jet in `x`.
    pub fn reduced_jet(&self, x: f64) -> Result<Jet2> {
        self.on_shear_path(Jet2::variable(x, 0, 1))
    }

    /// `W(3+x, 3+x, 1)` for a jet `x = γ²`. Hencky-type models use the
    /// closed-form shear spectrum instead of the contour integrals.
    fn on_shear_path(&self, x: Jet2) -> Result<Jet2> {
        match &self.kind {
            EnergyKind::Hencky | EnergyKind::ExpHencky => {
                // logarithmic strains (a, −a, 0) with a = asinh(γ/2)
                let dev = asinh_sq_half_sqrt(x)?.scale(2.0);
                self.hencky_from_parts(dev, Jet2::constant(0.0))
            }
            EnergyKind::Scaled { base, factor } => Ok(base.on_shear_path(x)?.scale(*factor)),
            // the penalty and its derivatives vanish on I3 = 1
            EnergyKind::Penalized { base, .. } => base.on_shear_path(x),
            _ => {
                let s = x + 3.0;
                self.eval_invariants(&[s, s, Jet2::constant(1.0)])
            }
        }
    }

    /// Isochoric part with the volumetric term `κ/2 (√I3 − 1)²` replaced by
    /// `ratio·μ/2 (√I3 − 1)²`.
    pub fn quasi_incompressible(&self, ratio: f64) -> Result<EnergyModel> {
        if !(ratio > 0.0) {
            return Err(range_err("ratio", ratio, "must be positive"));
        }
        let mu = self.params.get("mu").unwrap_or(1.0);
        let mut base = self.clone();
        match base.kind {
            EnergyKind::NeoHooke
            | EnergyKind::MooneyRivlin
            | EnergyKind::VerondaWestman
            | EnergyKind::MihaiNeff
            | EnergyKind::Ciarlet => base.params.set("kappa", 0.0)?,
            EnergyKind::Dsl(_) | EnergyKind::Svk | EnergyKind::FourthOrder => {}
            _ => {
                return Err(Error::Unsupported {
                    model: self.name.clone(),
                    what: "separable isochoric part",
                })
            }
        }
        let mut out = EnergyModel::penalized(base, ratio * mu)?;
        out.name = format!("{}(quasi-incompressible)", self.name);
        Ok(out)
    }

    /// The unpenalized part and penalty modulus of a penalized model.
    pub fn split_penalty(&self) -> (&EnergyModel, f64) {
        match &self.kind {
            EnergyKind::Penalized { base, kappa } => (base, *kappa),
            _ => (self, 0.0),
        }
    }

    /// Short description of the volumetric choice, printed in reports.
    pub fn volumetric_note(&self) -> Option<String> {
        match &self.kind {
            EnergyKind::NeoHooke
            | EnergyKind::MooneyRivlin
            | EnergyKind::VerondaWestman
            | EnergyKind::Ciarlet => Some(format!(
                "h(I3) = kappa/2 (sqrt(I3) - 1)^2 with kappa = {}",
                self.p("kappa")
            )),
            EnergyKind::Penalized { kappa, .. } => {
                Some(format!("penalty kappa/2 (sqrt(I3) - 1)^2 with kappa = {kappa}"))
            }
            _ => None,
        }
    }
}

impl fmt::Display for EnergyModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.params.is_empty() {
            write!(f, "{}", self.name)
        } else {
            write!(f, "{} ({})", self.name, self.params)
        }
    }
}

/// The counterexample energy
/// `3μα/4 [ln I1 + ln I2 − ln I3 − 2 ln 3] + μ(1−α)/2 [I1 + 2/√I3 − 5]`.
pub fn pucci_energy(mu: f64, alpha: f64) -> Result<EnergyModel> {
    EnergyModel::by_name("pucci")?
        .with_param("mu", mu)?
        .with_param("alpha", alpha)
}

/// Expected value of a catalog column.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum K2Expectation {
    Holds,
    Fails,
    NotApplicable,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Expected {
    pub aps_convex: bool,
    /// `None` when K1 does not hold.
    pub k1_b: Option<f64>,
    pub k2: K2Expectation,
}

/// A catalog model with the verdicts printed for it.
#[derive(Debug, Clone)]
pub struct CatalogEntry {
    pub label: &'static str,
    pub model: EnergyModel,
    /// `None` where the published table leaves the entry open.
    pub rank_one_convex: Option<bool>,
    pub k1_rule: &'static str,
    pub k2_rule: &'static str,
    rule: fn(&ParamTable) -> Expected,
}

impl CatalogEntry {
    /// Expected verdicts for the entry's current parameters.
    pub fn expected(&self) -> Expected {
        (self.rule)(self.model.params())
    }

    /// Same entry with a parameter changed.
    pub fn with_param(mut self, name: &str, value: f64) -> Result<CatalogEntry> {
        self.model = self.model.with_param(name, value)?;
        Ok(self)
    }
}

fn yes_no(holds: bool) -> K2Expectation {
    if holds {
        K2Expectation::Holds
    } else {
        K2Expectation::Fails
    }
}

/// The fourteen tabulated energies with default parameters.
pub fn catalog() -> Vec<CatalogEntry> {
    use K2Expectation::*;
    let entry = |label, name, rank_one, k1_rule, k2_rule, rule| CatalogEntry {
        label,
        model: EnergyModel::by_name(name).expect("builtin model"),
        rank_one_convex: rank_one,
        k1_rule,
        k2_rule,
        rule,
    };
    vec![
        entry("vol.+iso. Neo-Hooke", "neo-hooke", Some(true), "b = 0", "No", |_| Expected {
            aps_convex: true,
            k1_b: Some(0.0),
            k2: Fails,
        }),
        entry("vol.+iso. Mooney-Rivlin", "mooney-rivlin", Some(true), "b = 1-alpha", "No", |p| {
            Expected {
                aps_convex: true,
                k1_b: Some(1.0 - p.value("alpha")),
                k2: Fails,
            }
        }),
        entry("Blatz-Ko", "blatz-ko", Some(true), "b = 0", "Yes", |_| Expected {
            aps_convex: true,
            k1_b: Some(0.0),
            k2: Holds,
        }),
        entry("Veronda-Westman", "veronda-westman", Some(false), "No", "No", |_| Expected {
            aps_convex: true,
            k1_b: None,
            k2: Fails,
        }),
        entry("Mihai-Neff", "mihai-neff", Some(false), "b = 0", "mu_tilde = mu/3", |p| {
            Expected {
                aps_convex: true,
                k1_b: Some(0.0),
                k2: yes_no((p.value("mu_tilde") - p.value("mu") / 3.0).abs() < 1e-12),
            }
        }),
        entry("Knowles", "knowles", None, "b = 0", "No", |_| Expected {
            aps_convex: true,
            k1_b: Some(0.0),
            k2: Fails,
        }),
        entry("Bazant", "bazant", Some(false), "b = 1/2", "No", |_| Expected {
            aps_convex: true,
            k1_b: Some(0.5),
            k2: Fails,
        }),
        entry("Ciarlet", "ciarlet", Some(true), "b = c2/(c1+c2)", "c2 = 0", |p| {
            let (c1, c2) = (p.value("c1"), p.value("c2"));
            Expected {
                aps_convex: true,
                k1_b: Some(c2 / (c1 + c2)),
                k2: yes_no(c2 == 0.0),
            }
        }),
        entry("SVK", "svk", Some(false), "No", "-", |_| Expected {
            aps_convex: true,
            k1_b: None,
            k2: NotApplicable,
        }),
        entry("4th Order", "fourth-order", Some(false), "No", "-", |_| Expected {
            aps_convex: true,
            k1_b: None,
            k2: NotApplicable,
        }),
        entry("Hencky", "hencky", Some(false), "b = 1/2", "No", |_| Expected {
            aps_convex: false,
            k1_b: Some(0.5),
            k2: Fails,
        }),
        entry("exp-Hencky", "exp-hencky", Some(false), "b = 1/2", "No", |_| Expected {
            aps_convex: true,
            k1_b: Some(0.5),
            k2: Fails,
        }),
        entry("Martin-Neff", "martin-neff", Some(true), "b = 1/2", "No", |_| Expected {
            aps_convex: true,
            k1_b: Some(0.5),
            k2: Fails,
        }),
        entry("Model", "model", Some(true), "b = 1/2", "Yes", |_| Expected {
            aps_convex: true,
            k1_b: Some(0.5),
            k2: Holds,
        }),
    ]
}

/// Models whose published form is invariant under `F ↦ F⁻¹`.
pub fn is_tension_compression_symmetric_by_construction(model: &EnergyModel) -> bool {
    matches!(
        model.kind,
        EnergyKind::Bazant
            | EnergyKind::Hencky
            | EnergyKind::ExpHencky
            | EnergyKind::MartinNeff
            | EnergyKind::Model
    )
}
