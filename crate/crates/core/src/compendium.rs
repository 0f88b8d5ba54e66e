//! Constructors for concrete functions: the classical `gmic` and
//! `gomory_fractional` functions, the two-sided discontinuous function
//! `kzh_minimal_has_only_crazy_perturbation_1` over `Q(sqrt(2))` together with
//! its locally microperiodic perturbation, and a known non-extreme fixture.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exactfield::{qe, QuadraticElement as QE, Rational};
use crate::microperturb::{CrazyPerturbation, DenseGroup, MicroPiece};
use crate::pwfunction::{BreakpointDatum, PiecewiseFunction};

/// `(x, left limit, value, right limit, slope of the following interval)`;
/// omitted limits equal the value.
type Row = (&'static str, Option<&'static str>, &'static str, Option<&'static str>, &'static str);

/// Table of the two-sided discontinuous function.
#[rustfmt::skip]
const KZH_ROWS: [Row; 40] = [
    ("0", Some("101/650"), "0", Some("101/650"), "-5"),
    ("101/5000", Some("707/13000"), "2727/13000", Some("707/13000"), "35/13"),
    ("60153/369200", None, "421071/959920", None, "-5"),
    ("849/5000", Some("4851099/11999000"), "4851099/11999000-1925/71994*sqrt(2)", Some("4851099/11999000"), "35/13"),
    ("849/5000+1925/298129*sqrt(2)", None, "4851099/11999000+67375/3875677*sqrt(2)", None, "-5"),
    ("849/5000+77/7752*sqrt(2)", Some("4851099/11999000+385/93016248*sqrt(2)"), "4851099/11999000+2695/100776*sqrt(2)", Some("4851099/11999000+385/93016248*sqrt(2)"), "35/13"),
    ("19/100", Some("275183/599950-1925/71994*sqrt(2)"), "18196/59995", Some("275183/599950-1925/71994*sqrt(2)"), "35/13"),
    ("281986521/1490645000+77/22152*sqrt(2)", None, "10467633/22933000-385/22152*sqrt(2)", None, "-5"),
    ("40294/201875", Some("848837/2099500"), "795836841/1937838500", Some("848837/2099500"), "35/13"),
    ("36999/184600", None, "975607/2399800", None, "-5"),
    ("19/100+77/7752*sqrt(2)", Some("275183/599950-385/7752*sqrt(2)"), "18196/59995+385/93016248*sqrt(2)", Some("275183/599950-385/7752*sqrt(2)"), "-5"),
    ("1051/5000", Some("4291761/11999000"), "4291761/11999000-1925/71994*sqrt(2)", Some("4291761/11999000"), "35/13"),
    ("1051/5000+1925/298129*sqrt(2)", None, "4291761/11999000+67375/3875677*sqrt(2)", None, "-5"),
    ("14199/64600", Some("240046061/775135400+192500/3875677*sqrt(2)"), "50943/167960", Some("240046061/775135400+192500/3875677*sqrt(2)"), "-5"),
    ("1051/5000+77/7752*sqrt(2)", Some("4291761/11999000+385/93016248*sqrt(2)"), "4291761/11999000+2695/100776*sqrt(2)", Some("4291761/11999000+385/93016248*sqrt(2)"), "35/13"),
    ("342208579/1490645000+77/22152*sqrt(2)", None, "122181831/298129000-385/22152*sqrt(2)", None, "-5"),
    ("193799/807500", None, "187742/524875", None, "35/13"),
    ("219/800", None, "933/2080", Some("51443/147680"), "5/11999"),
    ("269/800", Some("668809/1919840"), "683/2080", None, "35/13"),
    ("371/800", None, "1397/2080", Some("1251031/1919840"), "5/11999"),
    ("421/800", Some("96237/147680"), "1147/2080", None, "35/13"),
    ("452201/807500", None, "337133/524875", None, "-5"),
    ("850307421/1490645000-77/22152*sqrt(2)", None, "175947169/298129000+385/22152*sqrt(2)", None, "35/13"),
    ("2949/5000-77/7752*sqrt(2)", Some("7707239/11999000-385/93016248*sqrt(2)"), "7707239/11999000-2695/100776*sqrt(2)", Some("7707239/11999000-385/93016248*sqrt(2)"), "-5"),
    ("37481/64600", Some("535089339/775135400-192500/3875677*sqrt(2)"), "117017/167960", Some("535089339/775135400-192500/3875677*sqrt(2)"), "-5"),
    ("2949/5000-1925/298129*sqrt(2)", None, "7707239/11999000-67375/3875677*sqrt(2)", None, "35/13"),
    ("2949/5000", Some("7707239/11999000"), "7707239/11999000+1925/71994*sqrt(2)", Some("7707239/11999000"), "-5"),
    ("61/100-77/7752*sqrt(2)", Some("324767/599950+385/7752*sqrt(2)"), "41799/59995-385/93016248*sqrt(2)", Some("324767/599950+385/7752*sqrt(2)"), "-5"),
    ("110681/184600", None, "1424193/2399800", None, "35/13"),
    ("121206/201875", Some("1250663/2099500"), "1142001659/1937838500", Some("1250663/2099500"), "-5"),
    ("910529479/1490645000-77/22152*sqrt(2)", None, "12465367/22933000+385/22152*sqrt(2)", None, "35/13"),
    ("61/100", Some("324767/599950+1925/71994*sqrt(2)"), "41799/59995", Some("324767/599950+1925/71994*sqrt(2)"), "35/13"),
    ("3151/5000-77/7752*sqrt(2)", Some("7147901/11999000-385/93016248*sqrt(2)"), "7147901/11999000-2695/100776*sqrt(2)", Some("7147901/11999000-385/93016248*sqrt(2)"), "-5"),
    ("3151/5000-1925/298129*sqrt(2)", None, "7147901/11999000-67375/3875677*sqrt(2)", None, "35/13"),
    ("3151/5000", Some("7147901/11999000"), "7147901/11999000+1925/71994*sqrt(2)", Some("7147901/11999000"), "-5"),
    ("235207/369200", None, "538849/959920", None, "35/13"),
    ("3899/5000", Some("12293/13000"), "10273/13000", Some("12293/13000"), "-5"),
    ("4/5", Some("549/650"), "1", Some("549/650"), "35/13"),
    ("4101/5000", Some("899/1000"), "9667/13000", Some("899/1000"), "-5"),
    ("4899/5000", Some("101/1000"), "3333/13000", Some("101/1000"), "35/13"),
];

/// The closing row at `x = 1`, which must agree with the row at 0.
const KZH_LAST_ROW: (&str, &str, &str, &str) = ("1", "101/650", "0", "101/650");

pub const KZH_F: &str = "4/5";
pub const KZH_L: &str = "219/800";
pub const KZH_U: &str = "269/800";
pub const KZH_T1: &str = "77/7752*sqrt(2)";
pub const KZH_T2: &str = "77/2584";

fn check_f(f: &QE) -> Result<()> {
    if f.sign() <= 0 || *f >= QE::one() {
        return Err(Error::InvalidFunction(format!("f = {} outside (0, 1)", f)));
    }
    Ok(())
}

/// Gomory mixed-integer cut: interpolates `π(0) = 0`, `π(f) = 1`, `π(1) = 0`.
pub fn gmic(f: &QE) -> Result<PiecewiseFunction> {
    check_f(f)?;
    let up = QE::one() / f;
    let down = -(QE::one() / (QE::one() - f));
    PiecewiseFunction::new(
        Some(f.clone()),
        vec![
            BreakpointDatum::continuous(QE::zero(), QE::zero()),
            BreakpointDatum::continuous(f.clone(), QE::one()),
        ],
        Some(vec![up, down]),
    )
}

/// Gomory fractional cut `frac(x)/f`, discontinuous at the integers.
pub fn gomory_fractional(f: &QE) -> Result<PiecewiseFunction> {
    check_f(f)?;
    let slope = QE::one() / f;
    PiecewiseFunction::new(
        Some(f.clone()),
        vec![
            BreakpointDatum {
                x: QE::zero(),
                value: QE::zero(),
                left_limit: slope.clone(),
                right_limit: QE::zero(),
            },
            BreakpointDatum::continuous(f.clone(), QE::one()),
        ],
        Some(vec![slope.clone(), slope]),
    )
}

/// The function `kzh_minimal_has_only_crazy_perturbation_1`, with `f = 4/5`,
/// 40 breakpoints in `[0, 1)` and slopes `35/13`, `5/11999` and `-5`.
pub fn kzh_minimal_has_only_crazy_perturbation_1() -> PiecewiseFunction {
    let mut breakpoints = Vec::with_capacity(KZH_ROWS.len());
    let mut slopes = Vec::with_capacity(KZH_ROWS.len());
    for (x, left, value, right, slope) in KZH_ROWS {
        let value = qe(value);
        breakpoints.push(BreakpointDatum {
            x: qe(x),
            left_limit: left.map(qe).unwrap_or_else(|| value.clone()),
            right_limit: right.map(qe).unwrap_or_else(|| value.clone()),
            value,
        });
        slopes.push(qe(slope));
    }
    let (x, left, value, right) = KZH_LAST_ROW;
    let closing = BreakpointDatum {
        x: qe(x) - QE::one(),
        value: qe(value),
        left_limit: qe(left),
        right_limit: qe(right),
    };
    debug_assert_eq!(closing, breakpoints[0]);
    PiecewiseFunction::new(Some(qe(KZH_F)), breakpoints, Some(slopes)).expect("table is well formed")
}

/// The locally microperiodic perturbation of the kzh function: `+1` on the
/// cosets `l + T` and `f - u + T`, `-1` on `u + T` and `f - l + T`, restricted
/// to `(l, u)` and `(f - u, f - l)`, where `T = <t1, t2>`.
pub fn kzh_crazy_perturbation() -> CrazyPerturbation {
    let f = qe(KZH_F);
    let l = qe(KZH_L);
    let u = qe(KZH_U);
    let group = DenseGroup::new(vec![qe(KZH_T1), qe(KZH_T2)]);
    let pwl = PiecewiseFunction::continuous(None, vec![(QE::zero(), QE::zero())]).expect("zero function");
    let pieces = vec![
        MicroPiece {
            interval: (l.clone(), u.clone()),
            cosets: vec![(l.clone(), QE::one()), (u.clone(), -QE::one())],
        },
        MicroPiece {
            interval: (&f - &u, &f - &l),
            cosets: vec![(&f - &u, QE::one()), (&f - &l, -QE::one())],
        },
    ];
    CrazyPerturbation::new(pwl, pieces, group).expect("valid perturbation")
}

/// `x ↦ π(k·x mod 1)` with right-hand side `f`; requires `k·f ≡ f` for the
/// result to satisfy `π(f) = 1` when `π` does.
pub fn compose_with_multiplication(pi: &PiecewiseFunction, k: u32, f: Option<QE>) -> Result<PiecewiseFunction> {
    if k == 0 {
        return Err(Error::Precondition("multiplier must be positive".into()));
    }
    let kq = QE::from_integer(k as i64);
    let mut breakpoints = Vec::with_capacity(pi.len() * k as usize);
    for j in 0..k {
        for b in pi.breakpoints() {
            breakpoints.push(BreakpointDatum {
                x: &(&b.x + &QE::from_integer(j as i64)) / &kq,
                ..b.clone()
            });
        }
    }
    let slopes = pi.declared_slopes().map(|s| {
        (0..k)
            .flat_map(|_| s.iter().map(|v| v * &kq))
            .collect::<Vec<_>>()
    });
    PiecewiseFunction::new(f, breakpoints, slopes)
}

/// `λ·π₁ + (1 − λ)·π₂` over the common refinement.
pub fn convex_combination(
    pi1: &PiecewiseFunction,
    pi2: &PiecewiseFunction,
    lambda: &Rational,
) -> Result<PiecewiseFunction> {
    if pi1.f() != pi2.f() {
        return Err(Error::Precondition("functions have different f".into()));
    }
    let lam = QE::from_rational(lambda.clone());
    if lam.sign() <= 0 || lam >= QE::one() {
        return Err(Error::Precondition("λ must lie strictly between 0 and 1".into()));
    }
    Ok(pi1.scaled(&lam).add_scaled(pi2, &(QE::one() - &lam)))
}

/// A minimal function that is not extreme, with its decomposition.
#[derive(Clone, Debug)]
pub struct NonExtremeFixture {
    /// `½(π₁ + π₂)`.
    pub function: PiecewiseFunction,
    /// `gmic(1/2)`.
    pub first: PiecewiseFunction,
    /// `gmic(1/2)` composed with `x ↦ 3x mod 1`.
    pub second: PiecewiseFunction,
    /// `½(π₁ − π₂)`, an effective perturbation of `function`.
    pub witness: PiecewiseFunction,
}

pub fn nonextreme_fixture() -> NonExtremeFixture {
    let half = QE::frac(1, 2);
    let first = gmic(&half).expect("valid f");
    let second = compose_with_multiplication(&first, 3, Some(half.clone())).expect("valid composition");
    let function = convex_combination(&first, &second, &Rational::new(1.into(), 2.into())).expect("same f");
    let witness = first.scaled(&half).add_scaled(&second, &(-&half));
    NonExtremeFixture {
        function,
        first,
        second,
        witness,
    }
}

/// Catalogue entry describing a named constructor and its known properties.
#[derive(Clone, Debug, Serialize)]
pub struct CompendiumEntry {
    pub name: &'static str,
    pub kind: EntryKind,
    pub parameters: &'static str,
    pub minimal: bool,
    pub extreme_relative_to_pwc: bool,
    pub has_crazy_perturbation: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EntryKind {
    Function,
    Perturbation,
}

pub fn entries() -> Vec<CompendiumEntry> {
    vec![
        CompendiumEntry {
            name: "gmic",
            kind: EntryKind::Function,
            parameters: "f (default 4/5)",
            minimal: true,
            extreme_relative_to_pwc: true,
            has_crazy_perturbation: false,
        },
        CompendiumEntry {
            name: "gomory_fractional",
            kind: EntryKind::Function,
            parameters: "f (default 4/5)",
            minimal: false,
            extreme_relative_to_pwc: false,
            has_crazy_perturbation: false,
        },
        CompendiumEntry {
            name: "kzh_minimal_has_only_crazy_perturbation_1",
            kind: EntryKind::Function,
            parameters: "none",
            minimal: true,
            extreme_relative_to_pwc: true,
            has_crazy_perturbation: true,
        },
        CompendiumEntry {
            name: "nonextreme_fixture",
            kind: EntryKind::Function,
            parameters: "none",
            minimal: true,
            extreme_relative_to_pwc: false,
            has_crazy_perturbation: false,
        },
        CompendiumEntry {
            name: "kzh_crazy_perturbation",
            kind: EntryKind::Perturbation,
            parameters: "none",
            minimal: false,
            extreme_relative_to_pwc: false,
            has_crazy_perturbation: false,
        },
    ]
}

/// A constructed compendium object.
#[derive(Clone, Debug)]
pub enum Emitted {
    Function(PiecewiseFunction),
    Perturbation(CrazyPerturbation),
}

impl Emitted {
    pub fn to_json(&self) -> String {
        match self {
            Emitted::Function(p) => p.to_json(),
            Emitted::Perturbation(p) => p.to_json(),
        }
    }
}

/// Builds the entry `name`; `f` overrides the default right-hand side where
/// the entry takes one.
pub fn emit(name: &str, f: Option<&QE>) -> Result<Emitted> {
    let f = f.cloned().unwrap_or_else(|| qe("4/5"));
    Ok(match name {
        "gmic" => Emitted::Function(gmic(&f)?),
        "gomory_fractional" => Emitted::Function(gomory_fractional(&f)?),
        "kzh_minimal_has_only_crazy_perturbation_1" => Emitted::Function(kzh_minimal_has_only_crazy_perturbation_1()),
        "nonextreme_fixture" => Emitted::Function(nonextreme_fixture().function),
        "kzh_crazy_perturbation" => Emitted::Perturbation(kzh_crazy_perturbation()),
        other => return Err(Error::InvalidFunction(format!("unknown compendium entry {other:?}"))),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pwfunction::Side;

    #[test]
    fn gmic_values() {
        let g = gmic(&qe("4/5")).unwrap();
        assert_eq!(g.evaluate(&qe("2/5")), qe("1/2"));
        assert_eq!(g.evaluate(&qe("9/10")), qe("1/2"));
        assert!(g.check_table_consistency().consistent);
        let tent = gmic(&qe("1/2")).unwrap();
        assert_eq!(tent.evaluate(&qe("1/4")), tent.evaluate(&qe("3/4")));
        assert!(gmic(&qe("1")).is_err());
        assert!(gmic(&qe("0")).is_err());
    }

    #[test]
    fn gomory_fractional_values() {
        let g = gomory_fractional(&qe("4/5")).unwrap();
        assert_eq!(g.evaluate(&qe("2/5")), qe("1/2"));
        assert_eq!(g.evaluate(&qe("0")), qe("0"));
        assert_eq!(g.limit(&qe("0"), Side::Left), qe("5/4"));
        assert!(g.check_table_consistency().consistent);
    }

    #[test]
    fn kzh_table_rows() {
        let h = kzh_minimal_has_only_crazy_perturbation_1();
        assert_eq!(h.len(), 40);
        assert!(h.check_table_consistency().consistent);
        assert_eq!(h.evaluate(&qe(KZH_L)), qe("933/2080"));
        assert_eq!(h.evaluate(&qe(KZH_U)), qe("683/2080"));
        assert_eq!(h.limit(&qe(KZH_U), Side::Left), qe("668809/1919840"));
        assert_eq!(
            h.evaluate(&qe("77/7752*sqrt(2) + 849/5000")),
            qe("2695/100776*sqrt(2) + 4851099/11999000")
        );
        assert_eq!(h.limit(&qe("0"), Side::Right), qe("101/650"));
        assert_eq!(h.limit(&qe("4/5"), Side::Left), qe("549/650"));
        assert_eq!(h.evaluate(&qe("101/10000")), qe("2727/26000"));
        assert_eq!(h.limit(&qe("101/5000"), Side::Left), qe("707/13000"));
    }

    #[test]
    fn kzh_symmetry_at_breakpoints() {
        let h = kzh_minimal_has_only_crazy_perturbation_1();
        let f = qe(KZH_F);
        let one = QE::one();
        for b in h.breakpoints() {
            let y = &f - &b.x;
            assert_eq!(&b.value + &h.evaluate(&y), one, "value at {}", b.x);
            assert_eq!(&b.left_limit + &h.limit(&y, Side::Right), one);
            assert_eq!(&b.right_limit + &h.limit(&y, Side::Left), one);
        }
    }

    #[test]
    fn kzh_two_sided_discontinuity_at_origin() {
        let h = kzh_minimal_has_only_crazy_perturbation_1();
        let b = &h.breakpoints()[0];
        assert!(b.value.is_zero());
        assert_eq!(b.left_limit, qe("101/650"));
        assert_eq!(b.right_limit, qe("101/650"));
    }

    #[test]
    fn fixture_shape() {
        let fx = nonextreme_fixture();
        assert_eq!(fx.second.evaluate(&qe("1/2")), QE::one());
        assert_eq!(fx.second.len(), 6);
        assert_eq!(fx.function.len(), 6);
        let same = convex_combination(&fx.first, &fx.first, &Rational::new(1.into(), 2.into())).unwrap();
        assert_eq!(same.breakpoints(), fx.first.breakpoints());
        assert!(convex_combination(&fx.first, &fx.first, &Rational::new(1.into(), 1.into())).is_err());
        assert!(convex_combination(&fx.first, &gmic(&qe("4/5")).unwrap(), &Rational::new(1.into(), 2.into())).is_err());
    }
}
