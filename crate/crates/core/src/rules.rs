//! Association rules with exact confidence.

use alloc::boxed::Box;
use alloc::vec::Vec;

use hashbrown::HashMap;

use crate::dataset::{Dataset, ItemId};
use crate::fraction::Fraction;
use crate::pattern::PatternSet;
use crate::{Error, Result};

/// `antecedent → consequent` with the counts behind its confidence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rule {
    /// Left-hand side, in the source pattern's order.
    pub antecedent: Box<[ItemId]>,
    /// Right-hand side, in the source pattern's order.
    pub consequent: Box<[ItemId]>,
    /// Support count of antecedent ∪ consequent.
    pub joint_count: u32,
    /// Support count of the antecedent.
    pub antecedent_count: u32,
}

impl Rule {
    /// `joint_count / antecedent_count`.
    pub fn confidence(&self) -> Fraction {
        Fraction::new(self.joint_count as u64, self.antecedent_count as u64)
            .expect("antecedent_count is positive for constructed rules")
    }
}

/// support(X ∪ Y) / support(X).
pub fn confidence(
    dataset: &Dataset,
    antecedent: &[ItemId],
    consequent: &[ItemId],
) -> Result<Fraction> {
    if antecedent.is_empty() || consequent.is_empty() {
        return Err(Error::EmptyItemset);
    }
    if antecedent.iter().any(|a| consequent.contains(a)) {
        return Err(Error::OverlappingItemsets);
    }
    let ante = dataset.support_count(antecedent)?;
    let mut union: Vec<ItemId> = antecedent.iter().chain(consequent).copied().collect();
    union.sort_unstable();
    let joint = dataset.support_count(&union)?;
    if ante == 0 {
        return Err(Error::ZeroAntecedentSupport);
    }
    Ok(Fraction::new(joint as u64, ante as u64).expect("non-zero denominator"))
}

struct CountCache<'a> {
    dataset: &'a Dataset,
    memo: HashMap<Vec<ItemId>, u32>,
}

impl CountCache<'_> {
    fn count(&mut self, items: &[ItemId]) -> Result<u32> {
        let mut key = items.to_vec();
        key.sort_unstable();
        if let Some(&c) = self.memo.get(&key) {
            return Ok(c);
        }
        let c = self.dataset.support_count(&key)?;
        self.memo.insert(key, c);
        Ok(c)
    }
}

/// Largest pattern whose rules are enumerated.
pub const MAX_RULE_PATTERN_LEN: usize = 32;

/// Emits `A → P \ A` for every pattern `P` and non-empty proper subset `A`
/// whose confidence reaches `min_confidence`.
///
/// Rules are ordered by pattern, then antecedent size descending, then
/// antecedent position within the pattern. Counts come from the dataset.
pub fn generate_rules(
    patterns: &PatternSet,
    dataset: &Dataset,
    min_confidence: Fraction,
) -> Result<Vec<Rule>> {
    if min_confidence > Fraction::ONE {
        return Err(Error::ConfidenceOutOfRange);
    }
    let mut cache = CountCache {
        dataset,
        memo: HashMap::new(),
    };
    let mut rules = Vec::new();
    let mut ante: Vec<ItemId> = Vec::new();
    let mut cons: Vec<ItemId> = Vec::new();
    for pattern in &patterns.patterns {
        let items = pattern.items();
        let k = items.len();
        if k < 2 {
            continue;
        }
        if k > MAX_RULE_PATTERN_LEN {
            return Err(Error::PatternTooLarge { len: k });
        }
        let joint = cache.count(items)?;
        for size in (1..k).rev() {
            for mask in masks_of_size(k, size) {
                ante.clear();
                cons.clear();
                for (bit, &item) in items.iter().enumerate() {
                    if mask & (1 << bit) != 0 {
                        ante.push(item);
                    } else {
                        cons.push(item);
                    }
                }
                let ante_count = cache.count(&ante)?;
                if ante_count == 0 {
                    return Err(Error::ZeroAntecedentSupport);
                }
                let passes = joint as u128 * min_confidence.denom() as u128
                    >= min_confidence.numer() as u128 * ante_count as u128;
                if passes {
                    rules.push(Rule {
                        antecedent: ante.as_slice().into(),
                        consequent: cons.as_slice().into(),
                        joint_count: joint,
                        antecedent_count: ante_count,
                    });
                }
            }
        }
    }
    Ok(rules)
}

/// Bitmasks over `k` positions with `size` bits set, ordered so that the
/// selected position lists come out lexicographically.
fn masks_of_size(k: usize, size: usize) -> impl Iterator<Item = u64> {
    let mut idx: Vec<usize> = (0..size).collect();
    let mut done = size == 0 || size > k;
    core::iter::from_fn(move || {
        if done {
            return None;
        }
        let mask = idx.iter().fold(0u64, |m, &i| m | (1 << i));
        // advance to the next combination
        let mut pos = size;
        loop {
            if pos == 0 {
                done = true;
                break;
            }
            pos -= 1;
            if idx[pos] != pos + k - size {
                idx[pos] += 1;
                for p in pos + 1..size {
                    idx[p] = idx[p - 1] + 1;
                }
                break;
            }
        }
        Some(mask)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::load_baskets;
    use crate::pattern::{Algorithm, Counters, Pattern};
    use alloc::vec;

    const SAMPLE: &str = "Milk Butter Sugar\nButter Beer\nButter Bread\nMilk Butter Beer\n\
Milk Bread\nButter Bread\nMilk Bread\nMilk Butter Bread Sugar\nMilk Butter Bread\n";

    fn sample() -> Dataset {
        load_baskets(SAMPLE.as_bytes()).unwrap().dataset
    }

    fn set_of(patterns: Vec<Pattern>) -> PatternSet {
        PatternSet {
            patterns,
            algorithm: Algorithm::Graph,
            counters: Counters::default(),
        }
    }

    #[test]
    fn confidence_examples() {
        let ds = sample();
        let s = |t: &[&str]| ds.itemset(t).unwrap();
        assert_eq!(
            confidence(&ds, &s(&["Milk", "Sugar"]), &s(&["Butter"])),
            Ok(Fraction::ONE)
        );
        assert_eq!(
            confidence(&ds, &s(&["Milk", "Butter"]), &s(&["Sugar"])),
            Ok(Fraction::new(1, 2).unwrap())
        );
    }

    #[test]
    fn confidence_errors() {
        let ds = load_baskets(b"a b\nc\n").unwrap().dataset;
        let s = |t: &[&str]| ds.itemset(t).unwrap();
        assert_eq!(confidence(&ds, &[], &s(&["a"])), Err(Error::EmptyItemset));
        assert_eq!(
            confidence(&ds, &s(&["a"]), &s(&["a", "b"])),
            Err(Error::OverlappingItemsets)
        );
        assert_eq!(
            confidence(&ds, &s(&["a", "c"]), &s(&["b"])),
            Err(Error::ZeroAntecedentSupport)
        );
    }

    #[test]
    fn all_rules_at_zero_confidence() {
        let ds = sample();
        let items = ds.itemset(&["Milk", "Butter", "Bread"]).unwrap();
        let rules =
            generate_rules(&set_of(vec![Pattern::new(items, 2)]), &ds, Fraction::ZERO).unwrap();
        assert_eq!(rules.len(), 6);
        assert!(rules.iter().all(|r| r.joint_count == 2));
        assert_eq!(rules[0].antecedent.len(), 2);
        assert_eq!(rules[5].antecedent.len(), 1);
    }

    #[test]
    fn rule_order_for_sugar_pattern() {
        let ds = sample();
        let items = ds.itemset(&["Milk", "Butter", "Sugar"]).unwrap();
        let rules = generate_rules(
            &set_of(vec![Pattern::new(items, 2)]),
            &ds,
            Fraction::parse_decimal("0.6").unwrap(),
        )
        .unwrap();
        let shown: Vec<(Vec<&str>, Vec<&str>)> = rules
            .iter()
            .map(|r| (ds.tokens_of(&r.antecedent), ds.tokens_of(&r.consequent)))
            .collect();
        assert_eq!(
            shown,
            vec![
                (vec!["Milk", "Sugar"], vec!["Butter"]),
                (vec!["Butter", "Sugar"], vec!["Milk"]),
                (vec!["Sugar"], vec!["Milk", "Butter"]),
            ]
        );
    }

    #[test]
    fn masks_are_lexicographic() {
        let masks: Vec<u64> = masks_of_size(4, 2).collect();
        assert_eq!(masks, vec![0b0011, 0b0101, 0b1001, 0b0110, 0b1010, 0b1100]);
        assert_eq!(masks_of_size(3, 3).count(), 1);
        assert_eq!(masks_of_size(3, 0).count(), 0);
    }

    #[test]
    fn rejects_confidence_above_one() {
        let ds = sample();
        assert_eq!(
            generate_rules(&set_of(vec![]), &ds, Fraction::new(3, 2).unwrap()),
            Err(Error::ConfidenceOutOfRange)
        );
    }
}
