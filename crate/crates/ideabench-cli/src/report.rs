//! CSV builders for the report command: the per-strategy leaderboard, the
//! raw density data behind it, and the between-strategy matrix.

use std::collections::BTreeMap;

use ideabench::embedding::EmbeddedPool;
use ideabench::similarity::{between_pool_mean, pairwise_matrix, within_pool_mean};

use crate::support::CliError;

pub struct StrategyGroup<'a> {
    pub strategy_id: String,
    pub pools: Vec<&'a EmbeddedPool>,
}

pub fn group_by_strategy(pools: &[EmbeddedPool]) -> Vec<StrategyGroup<'_>> {
    let mut groups: BTreeMap<String, Vec<&EmbeddedPool>> = BTreeMap::new();
    for pool in pools {
        groups.entry(pool.pool.strategy_id.clone()).or_default().push(pool);
    }
    groups
        .into_iter()
        .map(|(strategy_id, pools)| StrategyGroup { strategy_id, pools })
        .collect()
}

pub struct LeaderboardRow {
    pub strategy_id: String,
    pub mean_within_pool_cosine: f64,
    pub n_pools: usize,
    pub n_ideas: usize,
}

/// Pool means averaged per strategy, sorted ascending (most diverse first).
/// Pools too small for a pairwise mean are skipped with a note.
pub fn leaderboard(groups: &[StrategyGroup<'_>]) -> Result<Vec<LeaderboardRow>, CliError> {
    let mut rows = Vec::new();
    for group in groups {
        let mut pool_means = Vec::new();
        let mut n_ideas = 0;
        for pool in &group.pools {
            if pool.len() < 2 {
                eprintln!("note: pool of {} has fewer than 2 ideas; skipped", group.strategy_id);
                continue;
            }
            let matrix = pairwise_matrix(pool)
                .map_err(|e| CliError::analysis(format!("{}: {e}", group.strategy_id)))?;
            pool_means.push(
                within_pool_mean(&matrix)
                    .map_err(|e| CliError::analysis(format!("{}: {e}", group.strategy_id)))?,
            );
            n_ideas += pool.len();
        }
        if pool_means.is_empty() {
            continue;
        }
        rows.push(LeaderboardRow {
            strategy_id: group.strategy_id.clone(),
            mean_within_pool_cosine: pool_means.iter().sum::<f64>() / pool_means.len() as f64,
            n_pools: pool_means.len(),
            n_ideas,
        });
    }
    rows.sort_by(|a, b| a.mean_within_pool_cosine.total_cmp(&b.mean_within_pool_cosine));
    Ok(rows)
}

pub fn leaderboard_csv(rows: &[LeaderboardRow]) -> Result<String, CliError> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer
        .write_record(["strategy_id", "mean_within_pool_cosine", "n_pools", "n_ideas"])
        .map_err(csv_error)?;
    for row in rows {
        writer
            .write_record([
                row.strategy_id.as_str(),
                &format!("{:.6}", row.mean_within_pool_cosine),
                &row.n_pools.to_string(),
                &row.n_ideas.to_string(),
            ])
            .map_err(csv_error)?;
    }
    finish(writer)
}

/// All within-pool pairwise similarities, one row per pair, labeled by
/// strategy, for external density plotting.
pub fn density_rows(groups: &[StrategyGroup<'_>]) -> Result<Vec<(String, Vec<f64>)>, CliError> {
    let mut out = Vec::new();
    for group in groups {
        let mut values = Vec::new();
        for pool in &group.pools {
            if pool.len() < 2 {
                continue;
            }
            let matrix = pairwise_matrix(pool)
                .map_err(|e| CliError::analysis(format!("{}: {e}", group.strategy_id)))?;
            values.extend(matrix.upper_triangle());
        }
        if !values.is_empty() {
            out.push((group.strategy_id.clone(), values));
        }
    }
    Ok(out)
}

pub fn density_csv(rows: &[(String, Vec<f64>)]) -> Result<String, CliError> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer.write_record(["strategy_id", "similarity"]).map_err(csv_error)?;
    for (strategy, values) in rows {
        for value in values {
            writer
                .write_record([strategy.as_str(), &format!("{value:.6}")])
                .map_err(csv_error)?;
        }
    }
    finish(writer)
}

fn truncated(pool: &EmbeddedPool, k: usize) -> EmbeddedPool {
    let mut inner = pool.pool.clone();
    inner.ideas.truncate(k);
    EmbeddedPool::new(inner, pool.vectors[..k].to_vec(), pool.provider.clone())
        .expect("truncation keeps lengths aligned")
}

/// Mean cosine between every ordered pair of strategies, each pool
/// truncated to its first `first_k` ideas (or all of them when shorter),
/// averaged across pool pairs.
pub fn between_matrix(
    groups: &[StrategyGroup<'_>],
    first_k: usize,
) -> Result<(Vec<String>, Vec<Vec<f64>>), CliError> {
    let labels: Vec<String> = groups.iter().map(|g| g.strategy_id.clone()).collect();
    let mut matrix = vec![vec![0.0; groups.len()]; groups.len()];
    for (i, a) in groups.iter().enumerate() {
        for (j, b) in groups.iter().enumerate() {
            let mut cross = Vec::new();
            for pa in &a.pools {
                for pb in &b.pools {
                    if pa.is_empty() || pb.is_empty() {
                        continue;
                    }
                    let ta = truncated(pa, first_k.min(pa.len()));
                    let tb = truncated(pb, first_k.min(pb.len()));
                    let value = between_pool_mean(&ta, &tb, None)
                        .map_err(|e| CliError::analysis(format!("{} vs {}: {e}", a.strategy_id, b.strategy_id)))?;
                    cross.push(value);
                }
            }
            matrix[i][j] = if cross.is_empty() {
                f64::NAN
            } else {
                cross.iter().sum::<f64>() / cross.len() as f64
            };
        }
    }
    Ok((labels, matrix))
}

pub fn between_csv(labels: &[String], matrix: &[Vec<f64>]) -> Result<String, CliError> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    let mut head = vec!["strategy_id".to_string()];
    head.extend(labels.iter().cloned());
    writer.write_record(&head).map_err(csv_error)?;
    for (label, row) in labels.iter().zip(matrix) {
        let mut record = vec![label.clone()];
        record.extend(row.iter().map(|v| format!("{v:.6}")));
        writer.write_record(&record).map_err(csv_error)?;
    }
    finish(writer)
}

fn csv_error(e: csv::Error) -> CliError {
    CliError::analysis(format!("csv: {e}"))
}

fn finish(writer: csv::Writer<Vec<u8>>) -> Result<String, CliError> {
    let bytes = writer.into_inner().map_err(|e| CliError::analysis(format!("csv: {e}")))?;
    String::from_utf8(bytes).map_err(|e| CliError::analysis(format!("csv: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use ideabench::embedding::{EmbeddedPool, Vector};
    use ideabench::model::{Idea, Pool};

    fn embedded(strategy: &str, vectors: Vec<Vec<f64>>) -> EmbeddedPool {
        let mut pool = Pool::new(strategy, 0);
        for (i, _) in vectors.iter().enumerate() {
            pool.ideas.push(Idea {
                id: Idea::position_id(strategy, 0, i),
                name: format!("i{i}"),
                description: String::new(),
                raw_text: format!("i{i}"),
                strategy_id: strategy.to_string(),
                session_index: 0,
                idea_index: i,
            });
        }
        let vectors = vectors.into_iter().map(|v| Vector::normalized(v).unwrap()).collect();
        EmbeddedPool::new(pool, vectors, "fixture").unwrap()
    }

    #[test]
    fn leaderboard_averages_pools_of_one_strategy() {
        // Pool 1 mean = 1.0 (identical pair), pool 2 mean = 0.0 (orthogonal).
        let pools = vec![
            embedded("s", vec![vec![1.0, 0.0], vec![1.0, 0.0]]),
            embedded("s", vec![vec![1.0, 0.0], vec![0.0, 1.0]]),
        ];
        let groups = group_by_strategy(&pools);
        let rows = leaderboard(&groups).unwrap();
        assert_eq!(rows.len(), 1);
        assert!((rows[0].mean_within_pool_cosine - 0.5).abs() < 1e-12);
        assert_eq!(rows[0].n_pools, 2);
        assert_eq!(rows[0].n_ideas, 4);
    }

    #[test]
    fn leaderboard_sorts_ascending() {
        let pools = vec![
            embedded("similar", vec![vec![1.0, 0.0], vec![1.0, 0.0]]),
            embedded("diverse", vec![vec![1.0, 0.0], vec![0.0, 1.0]]),
        ];
        let groups = group_by_strategy(&pools);
        let rows = leaderboard(&groups).unwrap();
        assert_eq!(rows[0].strategy_id, "diverse");
        assert_eq!(rows[1].strategy_id, "similar");
    }

    #[test]
    fn between_matrix_is_square_with_strategy_labels() {
        let pools = vec![
            embedded("a", vec![vec![1.0, 0.0], vec![0.0, 1.0]]),
            embedded("b", vec![vec![1.0, 0.0]]),
        ];
        let groups = group_by_strategy(&pools);
        let (labels, matrix) = between_matrix(&groups, 50).unwrap();
        assert_eq!(labels, vec!["a".to_string(), "b".to_string()]);
        assert_eq!(matrix.len(), 2);
        // a vs b clamps to b's single idea: mean over a's first idea only.
        assert!((matrix[0][1] - 0.5).abs() < 1e-12);
        assert_eq!(matrix[0][1], matrix[1][0]);
    }

    #[test]
    fn csv_has_header_and_rows() {
        let pools = vec![embedded("s", vec![vec![1.0, 0.0], vec![0.0, 1.0]])];
        let groups = group_by_strategy(&pools);
        let rows = leaderboard(&groups).unwrap();
        let csv = leaderboard_csv(&rows).unwrap();
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), "strategy_id,mean_within_pool_cosine,n_pools,n_ideas");
        assert_eq!(lines.next().unwrap(), "s,0.000000,1,2");
    }
}
