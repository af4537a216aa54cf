//! The shipped solution files, embedded at build time.

use crate::codec::{parse, ParseError};
use crate::model::StrategyTree;
use crate::verify::Mode;

#[derive(Copy, Clone, Debug)]
pub struct Fixture {
    /// File stem under `fixtures/`.
    pub name: &'static str,
    pub coins: usize,
    pub weighings: usize,
    /// Mode the tree is meant to pass.
    pub mode: Mode,
    /// Expected answer of the scalability test, when it applies.
    pub scalable: Option<bool>,
    pub text: &'static str,
}

impl Fixture {
    pub fn tree(&self) -> Result<StrategyTree, ParseError> {
        parse(self.text, self.coins)
    }
}

macro_rules! fixture {
    ($name:literal, $coins:expr, $w:expr, $mode:expr, $scalable:expr) => {
        Fixture {
            name: $name,
            coins: $coins,
            weighings: $w,
            mode: $mode,
            scalable: $scalable,
            text: include_str!(concat!("../../../fixtures/", $name, ".txt")),
        }
    };
}

pub const INLINE_2_3: Fixture = fixture!("inline_2_3", 3, 2, Mode::Fc, Some(true));
pub const INLINE_2_4: Fixture = fixture!("inline_2_4", 4, 2, Mode::Fc, Some(false));
pub const INLINE_3_6: Fixture = fixture!("inline_3_6", 6, 3, Mode::Fc, Some(false));
pub const SCALABLE_3_6: Fixture = fixture!("scalable_3_6", 6, 3, Mode::Fc, Some(true));
pub const ALL_BALANCED_3_4: Fixture = fixture!("all_balanced_3_4", 4, 3, Mode::Fc, None);
pub const A_4_10: Fixture = fixture!("a_4_10", 10, 4, Mode::Fc, Some(true));
pub const B_4_11: Fixture = fixture!("b_4_11", 11, 4, Mode::Fc, Some(false));
pub const C_5_20: Fixture = fixture!("c_5_20", 20, 5, Mode::Fc, Some(true));
pub const D_6_36: Fixture = fixture!("d_6_36", 36, 6, Mode::Fc, Some(true));
pub const PSEUDO_4_11: Fixture = fixture!("pseudo_4_11", 11, 4, Mode::Pseudo, None);

pub const ALL: [Fixture; 10] = [
    INLINE_2_3,
    INLINE_2_4,
    INLINE_3_6,
    SCALABLE_3_6,
    ALL_BALANCED_3_4,
    A_4_10,
    B_4_11,
    C_5_20,
    D_6_36,
    PSEUDO_4_11,
];

pub fn by_name(name: &str) -> Option<Fixture> {
    ALL.iter().copied().find(|f| f.name == name)
}
