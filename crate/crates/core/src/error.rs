use core::fmt;

use crate::dataset::ItemId;

/// Errors raised by the mining core.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// Basket input is not valid UTF-8; `offset` is the first bad byte.
    InvalidUtf8 {
        /// Byte offset of the first invalid sequence.
        offset: usize,
    },
    /// An itemset argument was empty.
    EmptyItemset,
    /// An item id does not belong to the dataset.
    UnknownItem(ItemId),
    /// Rule antecedent and consequent share an item.
    OverlappingItemsets,
    /// The antecedent never occurs, so confidence is undefined.
    ZeroAntecedentSupport,
    /// Support fraction outside `(0, 1]`.
    SupportFractionOutOfRange,
    /// Confidence threshold outside `[0, 1]`.
    ConfidenceOutOfRange,
    /// A minimum support count of zero.
    ZeroSupportCount,
    /// A decimal fraction could not be parsed.
    InvalidFraction,
    /// A pattern has too many items to enumerate its rules.
    PatternTooLarge {
        /// Number of items in the offending pattern.
        len: usize,
    },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidUtf8 { offset } => write!(f, "invalid UTF-8 at byte offset {offset}"),
            Error::EmptyItemset => f.write_str("itemset must not be empty"),
            Error::UnknownItem(id) => write!(f, "item id {} is not in the dataset", id.index()),
            Error::OverlappingItemsets => f.write_str("antecedent and consequent overlap"),
            Error::ZeroAntecedentSupport => {
                f.write_str("antecedent has zero support; confidence is undefined")
            }
            Error::SupportFractionOutOfRange => f.write_str("support fraction must be in (0, 1]"),
            Error::ConfidenceOutOfRange => f.write_str("confidence must be in [0, 1]"),
            Error::ZeroSupportCount => f.write_str("minimum support count must be at least 1"),
            Error::InvalidFraction => f.write_str("not a decimal fraction"),
            Error::PatternTooLarge { len } => {
                write!(
                    f,
                    "pattern of {len} items is too large for rule enumeration"
                )
            }
        }
    }
}

impl core::error::Error for Error {}
