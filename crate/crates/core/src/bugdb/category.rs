use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// Vulnerability groups a bug record may belong to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum Category {
    OverflowUnderflow,
    BlockhashTimestamp,
    ImplicitVisibilityHoneyPot,
    OverpoweredOwner,
    Reentrancy,
    GasLimit,
    IncorrectSignatureReplay,
    Erc20TransferFlaw,
    BatchOverflow,
    UnsafeVerifyReverse,
}

impl Category {
    pub const ALL: [Category; 10] = [
        Category::OverflowUnderflow,
        Category::BlockhashTimestamp,
        Category::ImplicitVisibilityHoneyPot,
        Category::OverpoweredOwner,
        Category::Reentrancy,
        Category::GasLimit,
        Category::IncorrectSignatureReplay,
        Category::Erc20TransferFlaw,
        Category::BatchOverflow,
        Category::UnsafeVerifyReverse,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Category::OverflowUnderflow => "Overflow/Underflow",
            Category::BlockhashTimestamp => "Blockhash/Timestamp",
            Category::ImplicitVisibilityHoneyPot => "Implicit Visibility/HoneyPot",
            Category::OverpoweredOwner => "Overpowered Owner",
            Category::Reentrancy => "Reentrancy",
            Category::GasLimit => "Gas Limit",
            Category::IncorrectSignatureReplay => "Incorrect Signature/Replay",
            Category::Erc20TransferFlaw => "ERC-20 Transfer Flaw",
            Category::BatchOverflow => "Batch Overflow",
            Category::UnsafeVerifyReverse => "Unsafe/Verify Reverse",
        }
    }
}

fn squash(s: &str) -> String {
    s.chars().filter(|c| c.is_ascii_alphanumeric()).map(|c| c.to_ascii_lowercase()).collect()
}

impl FromStr for Category {
    type Err = String;

    /// Accepts the display name, ignoring case, spaces and punctuation, so
    /// `overflow-underflow` and `Overflow/Underflow` are the same.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let key = squash(s);
        Category::ALL.into_iter().find(|c| squash(c.name()) == key).ok_or_else(|| {
            let names: Vec<_> = Category::ALL.iter().map(|c| c.name()).collect();
            format!("unknown category `{s}`; known categories: {}", names.join(", "))
        })
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl TryFrom<String> for Category {
    type Error = String;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

impl From<Category> for String {
    fn from(c: Category) -> String {
        c.name().to_string()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Detection,
    Validation,
}

impl Split {
    pub fn as_str(self) -> &'static str {
        match self {
            Split::Detection => "detection",
            Split::Validation => "validation",
        }
    }
}

impl fmt::Display for Split {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Split {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "detection" => Ok(Split::Detection),
            "validation" => Ok(Split::Validation),
            _ => Err(format!("unknown split `{s}` (expected detection or validation)")),
        }
    }
}
