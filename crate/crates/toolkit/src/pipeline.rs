//! Mine-then-rules pipeline shared by `mine` and `bench`.

use agraph_core::{
    apriori_mine, build_cooccurrence, frequent_items_with, generate_rules, maximal_frequent,
    mine_patterns, Algorithm, Dataset, FrequentItemsetTable, PatternSet, Rule, Thresholds,
    VertexOrder,
};

/// Everything one pipeline run produces.
#[derive(Debug, Clone)]
pub struct PipelineOutput {
    /// Patterns the rules were generated from. For Apriori these are the
    /// maximal frequent itemsets.
    pub patterns: PatternSet,
    /// Rules meeting the confidence threshold.
    pub rules: Vec<Rule>,
    /// Full frequent-itemset table (Apriori only).
    pub table: Option<FrequentItemsetTable>,
    /// Number of frequent single items.
    pub n_frequent_items: usize,
    /// Support count the run used.
    pub min_support_count: u32,
}

/// Mines `dataset` with `algorithm` and derives rules.
pub fn run_pipeline(
    dataset: &Dataset,
    thresholds: &Thresholds,
    algorithm: Algorithm,
    vertex_order: &VertexOrder,
) -> agraph_core::Result<PipelineOutput> {
    let min = thresholds.min_support_count(dataset.len());
    let (patterns, table, n_frequent_items) = match algorithm {
        Algorithm::Apriori => {
            let table = apriori_mine(dataset, min)?;
            let l1 = table.level(1).len();
            (maximal_frequent(&table), Some(table), l1)
        }
        Algorithm::Graph => {
            let order = frequent_items_with(dataset, min, vertex_order)?;
            let matrix = build_cooccurrence(dataset, &order);
            (
                mine_patterns(dataset, &order, &matrix, min)?,
                None,
                order.len(),
            )
        }
    };
    let rules = generate_rules(&patterns, dataset, thresholds.min_confidence())?;
    Ok(PipelineOutput {
        patterns,
        rules,
        table,
        n_frequent_items,
        min_support_count: min,
    })
}
