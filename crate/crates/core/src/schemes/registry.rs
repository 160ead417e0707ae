//! Built-in coefficient sets.

use super::{ButcherTableau, LowStorageForm, Scheme, SchemeError};
use crate::convert::lowstorage_to_a;
use crate::numerics::{ExtFloat, DEFAULT_PRECISION};

struct RationalEntry {
    name: &'static str,
    order: u32,
    provenance: &'static str,
    c: &'static [&'static str],
    a: &'static [&'static [&'static str]],
    b: &'static [&'static str],
    ab: Option<(&'static [&'static str], &'static [&'static str])>,
}

const RATIONAL: &[RationalEntry] = &[
    RationalEntry {
        name: "43-b3zero",
        order: 3,
        provenance: "(4,3) 2N-storage method with b3 = 0; exposes the special-case error of Williamson's mapping",
        c: &["0", "1/2", "5/9", "3/4"],
        a: &[&["1/2"], &["2/9", "1/3"], &["3/176", "51/88", "27/176"]],
        b: &["2/9", "1/3", "0", "4/9"],
        ab: Some((&["0", "-5/6", "130/81", "-243/704"], &["1/2", "1/3", "27/176", "4/9"])),
    },
    RationalEntry {
        name: "53-b4zero",
        order: 3,
        provenance: "(5,3) 2N-storage method with b4 = 0; exposes the special-case error of Williamson's mapping",
        c: &["0", "1/3", "1/2", "7/9", "1"],
        a: &[&["1/3"], &["1/8", "3/8"], &["1/18", "1/2", "2/9"], &["81/328", "51/328", "-16/41", "81/82"]],
        b: &["1/18", "1/2", "2/9", "0", "2/9"],
        ab: Some((&["0", "-5/9", "9/16", "-452/729", "-729/164"], &["1/3", "3/8", "2/9", "81/82", "2/9"])),
    },
    RationalEntry {
        name: "43-1",
        order: 3,
        provenance: "(4,3)_1 rational 2N-storage method, fourth order for linear problems",
        c: &["0", "1/4", "7/12", "4/5"],
        a: &[&["1/4"], &["-1/12", "2/3"], &["12/25", "-23/50", "39/50"]],
        b: &["1/6", "1/6", "9/26", "25/78"],
        ab: Some((&["0", "-1/2", "-13/9", "-846/625"], &["1/4", "2/3", "39/50", "25/78"])),
    },
    RationalEntry {
        name: "43-2",
        order: 3,
        provenance: "(4,3)_2 rational 2N-storage method, fourth order for linear problems",
        c: &["0", "1/5", "3/5", "13/15"],
        a: &[&["1/5"], &["-3/20", "3/4"], &["143/540", "-5/36", "20/27"]],
        b: &["-1/9", "2/3", "5/72", "3/8"],
        ab: Some((&["0", "-7/15", "-6/5", "-145/81"], &["1/5", "3/4", "20/27", "3/8"])),
    },
    RationalEntry {
        name: "43-3",
        order: 3,
        provenance: "(4,3)_3 rational 2N-storage method, fourth order for linear problems",
        c: &["0", "2/15", "2/5", "4/5"],
        a: &[&["2/15"], &["-7/20", "3/4"], &["169/180", "-5/4", "10/9"]],
        b: &["3/8", "-3/8", "5/8", "3/8"],
        ab: Some((&["0", "-29/45", "-9/5", "-35/27"], &["2/15", "3/4", "10/9", "3/8"])),
    },
    RationalEntry {
        name: "43-4",
        order: 3,
        provenance: "(4,3)_4 rational 2N-storage method, fourth order for linear problems",
        c: &["0", "13/28", "4/7", "37/42"],
        a: &[&["13/28"], &["-32/91", "12/13"], &["1091/2184", "-14/351", "91/216"]],
        b: &["5/26", "4/13", "7/26", "3/13"],
        ab: Some((&["0", "-99/112", "-16/7", "-427/648"], &["13/28", "12/13", "91/216", "3/13"])),
    },
    RationalEntry {
        name: "53-1",
        order: 3,
        provenance: "(5,3)_1 rational 2N-storage method with the lowest error on the three test problems",
        c: &["0", "1/4", "8/15", "12/17", "5/6"],
        a: &[
            &["1/4"],
            &["-16/225", "136/225"],
            &["832/1005", "-18584/17085", "1100/1139"],
            &["-13213/60300", "13312/15075", "-1875/11792", "289/880"],
        ],
        b: &["15/94", "8/47", "1025/4136", "867/4136", "10/47"],
        ab: Some((
            &["0", "-17/32", "-9856/5625", "-1127375/329171", "-4913/8800"],
            &["1/4", "136/225", "1100/1139", "289/880", "10/47"],
        )),
    },
    RationalEntry {
        name: "53-2",
        order: 3,
        provenance: "(5,3)_2 rational 2N-storage method with a large stability region",
        c: &["0", "1/4", "4/7", "2/3", "13/14"],
        a: &[
            &["1/4"],
            &["-8/49", "36/49"],
            &["163/2394", "3484/10773", "847/3078"],
            &["2053/11172", "2960/25137", "847/2052", "3/14"],
        ],
        b: &["37/258", "220/1161", "847/2322", "6/43", "7/43"],
        ab: Some((
            &["0", "-9/16", "-62032/41503", "5929/9234", "-45/98"],
            &["1/4", "36/49", "847/3078", "3/14", "7/43"],
        )),
    },
    RationalEntry {
        name: "53-3",
        order: 3,
        provenance: "(5,3)_3 rational 2N-storage method, fourth order for linear problems, extended stability region",
        c: &["0", "2/9", "1/2", "13/18", "9/10"],
        a: &[
            &["2/9"],
            &["-1/8", "5/8"],
            &["179/360", "-99/200", "18/25"],
            &["99/1000", "1109/5000", "162/625", "8/25"],
        ],
        b: &["1/6", "1/10", "27/80", "17/64", "25/192"],
        ab: Some((&["0", "-5/9", "-14/9", "-36/25", "-261/625"], &["2/9", "5/8", "18/25", "8/25", "25/192"])),
    },
    RationalEntry {
        name: "53-4",
        order: 3,
        provenance: "(5,3)_4 rational 2N-storage method; stage 5 is second order, giving an embedded (3,2) pair",
        c: &["0", "1/4", "1/2", "3/4", "1"],
        a: &[&["1/4"], &["-1/6", "2/3"], &["1/4", "0", "1/2"], &["0", "2/5", "1/5", "2/5"]],
        b: &["1/9", "2/9", "1/3", "2/9", "1/9"],
        ab: Some((&["0", "-5/8", "-4/3", "-3/4", "-8/5"], &["1/4", "2/3", "1/2", "2/5", "1/9"])),
    },
    RationalEntry {
        name: "rk4-classic",
        order: 4,
        provenance: "classical four-stage Runge-Kutta method; not a 2N-storage method",
        c: &["0", "1/2", "1/2", "1"],
        a: &[&["1/2"], &["0", "1/2"], &["0", "0", "1"]],
        b: &["1/6", "1/3", "1/3", "1/6"],
        ab: None,
    },
];

/// Printed A and B of the (6,4) scheme with B6 fixed to 0.27.
pub(crate) const BERLAND_A: [&str; 6] = [
    "0",
    "-7.371013927959100015085736294563710861301655e-01",
    "-1.634740794340906961222612899974121227203739e+00",
    "-7.447390037800703313971792823734483498376512e-01",
    "-1.469897351521944371244484234187043583134644e+00",
    "-2.813971388035238894872690695659944758090490e+00",
];

pub(crate) const BERLAND_B: [&str; 6] = [
    "3.291860514560574016139360757085052620500596e-02",
    "8.232569981988439778822317874254015260794315e-01",
    "3.815309489002858170631520216481864120871775e-01",
    "2.000922131840258454393248810001898523823106e-01",
    "1.718581042714403494253985915871400632540402e+00",
    "2.700000000000000000000000000000000000000000e-01",
];

/// Printed nodes c2..c6 of the same scheme.
pub const BERLAND_C: [&str; 5] = [
    "3.291860514560574016139360757085052620500596e-02",
    "2.493517233431018504774294242339061755717526e-01",
    "4.669117050548576634478026408182787823664122e-01",
    "5.820304140439261598301282787623770385763741e-01",
    "8.472529837826966533345857631306276101828820e-01",
];

/// Tableau obtained from the wrong A, B of "43-b3zero" (c, rows, b).
pub const LEGACY_43_TABLEAU: (&[&str], &[&[&str]], &[&str]) = (
    &["0", "1/2", "5/9", "77/108"],
    &[&["1/2"], &["2/9", "1/3"], &["961/4752", "283/792", "27/176"]],
    &["2/9", "1/3", "0", "4/9"],
);

/// Tableau obtained from the wrong A, B of "53-b4zero".
pub const LEGACY_53_TABLEAU: (&[&str], &[&[&str]], &[&str]) = (
    &["0", "1/3", "1/2", "7/9", "11/36"],
    &[&["1/3"], &["1/8", "3/8"], &["1/18", "1/2", "2/9"], &["2483/5904", "-103/656", "-349/369", "81/82"]],
    &["1/18", "1/2", "2/9", "0", "2/9"],
);

pub fn registry_names() -> Vec<&'static str> {
    let mut v: Vec<_> = RATIONAL.iter().map(|e| e.name).collect();
    v.insert(v.len() - 1, "64-berland");
    v
}

fn berland() -> Scheme {
    let p = |s: &&str| ExtFloat::parse(s, DEFAULT_PRECISION).expect("valid literal");
    let ls = LowStorageForm::new(BERLAND_A.iter().map(p).collect(), BERLAND_B.iter().map(p).collect())
        .expect("valid A, B");
    let tableau = lowstorage_to_a(&ls);
    Scheme::decimal(
        "64-berland",
        4,
        "(6,4) 2N-storage method, B6 fixed to 0.27, refined to 42 digits; tableau derived from A, B",
        tableau,
        Some(ls),
    )
    .expect("consistent forms")
}

pub fn registry_get(name: &str) -> Result<Scheme, SchemeError> {
    if name == "64-berland" {
        return Ok(berland());
    }
    let e = RATIONAL
        .iter()
        .find(|e| e.name == name)
        .ok_or_else(|| SchemeError::Unknown(name.to_string()))?;
    let tableau = ButcherTableau::parse(e.c, e.a, e.b)?;
    let ls = e.ab.map(|(a, b)| LowStorageForm::parse(a, b)).transpose()?;
    Scheme::rational(e.name, e.order, e.provenance, tableau, ls)
}
