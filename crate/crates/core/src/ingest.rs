//! Rating-file parsing and coarse-graining into a binary bipartite graph.
//!
//! Two MovieLens layouts are supported: `UserID::MovieID::Rating::Timestamp`
//! (the 1M release) and tab-separated `user item rating timestamp` (100K).
//! Ratings at or above the threshold become links; everything else is
//! discarded, and duplicate qualifying pairs collapse to one link.

use std::collections::BTreeSet;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::graph::{BipartiteGraph, IdMap};

/// On-disk layout of a ratings file.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RatingFormat {
    /// `UserID::MovieID::Rating::Timestamp`
    Ml1m,
    /// Tab-separated `user item rating timestamp`
    Ml100k,
}

impl RatingFormat {
    fn delimiter(self) -> &'static str {
        match self {
            RatingFormat::Ml1m => "::",
            RatingFormat::Ml100k => "\t",
        }
    }
}

impl FromStr for RatingFormat {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "ml1m" | "ml-1m" => Ok(RatingFormat::Ml1m),
            "ml100k" | "ml-100k" => Ok(RatingFormat::Ml100k),
            other => Err(format!("unknown rating format `{other}`")),
        }
    }
}

/// One parsed rating line.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RatingRecord {
    pub user_ext: u64,
    pub object_ext: u64,
    pub rating: u8,
    pub timestamp: Option<i64>,
}

/// Parses a ratings stream; one record per well-formed line, input order kept.
///
/// Trailing blank lines are ignored. Errors carry the 1-based line number.
pub fn parse_ratings<R: Read>(source: R, format: RatingFormat) -> Result<Vec<RatingRecord>> {
    let reader = BufReader::new(source);
    let mut records = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        let line_no = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        records.push(parse_line(&line, format.delimiter(), line_no)?);
    }
    Ok(records)
}

fn parse_line(line: &str, delim: &str, line_no: usize) -> Result<RatingRecord> {
    let mut fields = line.trim_end().split(delim);
    let mut next_num = |name: &str| -> Result<u64> {
        let field = fields.next().ok_or_else(|| Error::MalformedLine {
            line: line_no,
            reason: format!("missing {name} field"),
        })?;
        field.trim().parse::<u64>().map_err(|_| Error::MalformedLine {
            line: line_no,
            reason: format!("{name} `{field}` is not an integer"),
        })
    };
    let user_ext = next_num("user")?;
    let object_ext = next_num("object")?;
    let rating = {
        let field = fields.next().ok_or_else(|| Error::MalformedLine {
            line: line_no,
            reason: "missing rating field".into(),
        })?;
        let value = field.trim().parse::<i64>().map_err(|_| Error::MalformedLine {
            line: line_no,
            reason: format!("rating `{field}` is not an integer"),
        })?;
        if !(1..=5).contains(&value) {
            return Err(Error::RatingOutOfRange {
                line: line_no,
                value,
            });
        }
        value as u8
    };
    let timestamp = match fields.next() {
        None => None,
        Some(field) => Some(field.trim().parse::<i64>().map_err(|_| {
            Error::MalformedLine {
                line: line_no,
                reason: format!("timestamp `{field}` is not an integer"),
            }
        })?),
    };
    Ok(RatingRecord {
        user_ext,
        object_ext,
        rating,
        timestamp,
    })
}

/// Raw-versus-linked counts, kept so published catalog statistics can be
/// reconciled with the graph that actually carries links.
///
/// `users_catalog` / `objects_catalog` follow the MovieLens convention of
/// 1-based contiguous identifier ranges, i.e. the maximum external id seen in
/// the file. The `*_linked` counts are the entities left after
/// coarse-graining.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct IngestStats {
    pub records: usize,
    pub users_seen: usize,
    pub objects_seen: usize,
    pub users_catalog: u64,
    pub objects_catalog: u64,
    pub users_linked: usize,
    pub objects_linked: usize,
    pub links: usize,
    /// `p / (users_catalog * objects_catalog)`, the convention used for
    /// published sparsity figures.
    pub sparsity_catalog: f64,
    /// `p / (users_linked * objects_linked)`.
    pub sparsity_linked: f64,
}

/// Thresholds ratings into binary links and builds the bipartite graph.
///
/// A link `(user, object)` exists iff some record for that pair has
/// `rating >= threshold`. Users and objects with no qualifying record get no
/// dense index. Dense indices are assigned in ascending external-id order, so
/// the graph is independent of record order.
pub fn coarse_grain(records: &[RatingRecord], threshold: u8) -> Result<BipartiteGraph> {
    coarse_grain_with_stats(records, threshold).map(|(g, _)| g)
}

/// As [`coarse_grain`], also returning raw/linked diagnostics.
pub fn coarse_grain_with_stats(
    records: &[RatingRecord],
    threshold: u8,
) -> Result<(BipartiteGraph, IngestStats)> {
    if !(1..=5).contains(&threshold) {
        return Err(Error::InvalidThreshold(threshold));
    }
    let mut users_seen = BTreeSet::new();
    let mut objects_seen = BTreeSet::new();
    let mut pairs = BTreeSet::new();
    for r in records {
        users_seen.insert(r.user_ext);
        objects_seen.insert(r.object_ext);
        if r.rating >= threshold {
            pairs.insert((r.user_ext, r.object_ext));
        }
    }
    if pairs.is_empty() {
        return Err(Error::EmptyGraph);
    }

    let linked_users: Vec<u64> = pairs
        .iter()
        .map(|&(u, _)| u)
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let linked_objects: Vec<u64> = pairs
        .iter()
        .map(|&(_, o)| o)
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let user_ids = IdMap::new(linked_users);
    let object_ids = IdMap::new(linked_objects);

    let links: Vec<(u32, u32)> = pairs
        .iter()
        .map(|&(u, o)| {
            (
                user_ids.dense(u).expect("linked user indexed"),
                object_ids.dense(o).expect("linked object indexed"),
            )
        })
        .collect();
    let graph = BipartiteGraph::from_links(user_ids, object_ids, &links);

    let users_catalog = users_seen.iter().next_back().copied().unwrap_or(0);
    let objects_catalog = objects_seen.iter().next_back().copied().unwrap_or(0);
    let p = graph.links() as f64;
    let stats = IngestStats {
        records: records.len(),
        users_seen: users_seen.len(),
        objects_seen: objects_seen.len(),
        users_catalog,
        objects_catalog,
        users_linked: graph.n(),
        objects_linked: graph.m(),
        links: graph.links(),
        sparsity_catalog: p / (users_catalog as f64 * objects_catalog as f64),
        sparsity_linked: graph.sparsity(),
    };
    Ok((graph, stats))
}

/// Parses and coarse-grains a ratings file in one step.
pub fn load_ratings_file(
    path: &Path,
    format: RatingFormat,
    threshold: u8,
) -> Result<(BipartiteGraph, IngestStats)> {
    let file = File::open(path)?;
    let records = parse_ratings(file, format)?;
    coarse_grain_with_stats(&records, threshold)
}

const GRAPH_CACHE_HEADER: &str = "walkcf-graph v1";

/// Writes the graph as a line-oriented edge list with id maps.
///
/// Layout: header line, `n m p`, `n` external user ids, `m` external object
/// ids, then `p` dense `user object` pairs in user-major order.
pub fn save_graph(graph: &BipartiteGraph, path: &Path) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "{GRAPH_CACHE_HEADER}")?;
    writeln!(w, "{} {} {}", graph.n(), graph.m(), graph.links())?;
    for &ext in graph.user_ids().externals() {
        writeln!(w, "{ext}")?;
    }
    for &ext in graph.object_ids().externals() {
        writeln!(w, "{ext}")?;
    }
    for (u, o) in graph.edges() {
        writeln!(w, "{u} {o}")?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a graph written by [`save_graph`].
pub fn load_graph(path: &Path) -> Result<BipartiteGraph> {
    let bad = |reason: &str| Error::CacheFormat {
        path: path.to_path_buf(),
        reason: reason.to_string(),
    };
    let mut lines = BufReader::new(File::open(path)?).lines();
    let mut next = |reason: &'static str| -> Result<String> {
        lines
            .next()
            .transpose()?
            .ok_or_else(|| bad(&format!("truncated file: expected {reason}")))
    };
    if next("header")? != GRAPH_CACHE_HEADER {
        return Err(bad("unrecognized header"));
    }
    let dims = next("dimensions")?;
    let mut parts = dims.split_whitespace().map(|t| t.parse::<usize>());
    let mut dim = |name: &'static str| -> Result<usize> {
        parts
            .next()
            .and_then(|r| r.ok())
            .ok_or_else(|| bad(&format!("bad {name} in dimension line")))
    };
    let (n, m, p) = (dim("n")?, dim("m")?, dim("p")?);
    let mut users = Vec::with_capacity(n);
    for _ in 0..n {
        users.push(
            next("user id")?
                .trim()
                .parse::<u64>()
                .map_err(|_| bad("bad user id"))?,
        );
    }
    let mut objects = Vec::with_capacity(m);
    for _ in 0..m {
        objects.push(
            next("object id")?
                .trim()
                .parse::<u64>()
                .map_err(|_| bad("bad object id"))?,
        );
    }
    let mut links = Vec::with_capacity(p);
    for _ in 0..p {
        let line = next("edge")?;
        let mut it = line.split_whitespace().map(|t| t.parse::<u32>());
        let (u, o) = match (it.next(), it.next()) {
            (Some(Ok(u)), Some(Ok(o))) => (u, o),
            _ => return Err(bad("bad edge line")),
        };
        if u as usize >= n || o as usize >= m {
            return Err(bad("edge index out of range"));
        }
        links.push((u, o));
    }
    let graph = BipartiteGraph::from_links(IdMap::new(users), IdMap::new(objects), &links);
    if graph.links() != p {
        return Err(bad("edge count mismatch"));
    }
    Ok(graph)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_double_colon_line() {
        let input = "1::1193::5::978300760\n";
        let recs = parse_ratings(input.as_bytes(), RatingFormat::Ml1m).unwrap();
        assert_eq!(
            recs,
            vec![RatingRecord {
                user_ext: 1,
                object_ext: 1193,
                rating: 5,
                timestamp: Some(978300760),
            }]
        );
    }

    #[test]
    fn parses_tab_line() {
        let input = "3\t42\t2\t888\n";
        let recs = parse_ratings(input.as_bytes(), RatingFormat::Ml100k).unwrap();
        assert_eq!(
            recs,
            vec![RatingRecord {
                user_ext: 3,
                object_ext: 42,
                rating: 2,
                timestamp: Some(888),
            }]
        );
    }

    #[test]
    fn missing_fields_error_carries_line_number() {
        let input = "1::1193";
        let err = parse_ratings(input.as_bytes(), RatingFormat::Ml1m).unwrap_err();
        match err {
            Error::MalformedLine { line, .. } => assert_eq!(line, 1),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn rating_out_of_range_is_rejected() {
        let input = "1::2::6::3\n";
        let err = parse_ratings(input.as_bytes(), RatingFormat::Ml1m).unwrap_err();
        match err {
            Error::RatingOutOfRange { line: 1, value: 6 } => {}
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn timestamp_is_optional() {
        let recs = parse_ratings("7::8::4\n".as_bytes(), RatingFormat::Ml1m).unwrap();
        assert_eq!(recs[0].timestamp, None);
    }

    #[test]
    fn blank_trailing_lines_are_ignored() {
        let recs = parse_ratings("1::2::3::4\n\n\n".as_bytes(), RatingFormat::Ml1m).unwrap();
        assert_eq!(recs.len(), 1);
    }

    #[test]
    fn preserves_input_order() {
        let input = "5::1::4::0\n2::9::3::0\n";
        let recs = parse_ratings(input.as_bytes(), RatingFormat::Ml1m).unwrap();
        assert_eq!(recs[0].user_ext, 5);
        assert_eq!(recs[1].user_ext, 2);
    }

    fn rec(u: u64, o: u64, r: u8) -> RatingRecord {
        RatingRecord {
            user_ext: u,
            object_ext: o,
            rating: r,
            timestamp: None,
        }
    }

    #[test]
    fn threshold_is_inclusive() {
        let g = coarse_grain(&[rec(1, 1, 3)], 3).unwrap();
        assert_eq!(g.links(), 1);
    }

    #[test]
    fn below_threshold_everything_yields_empty_graph_error() {
        let err = coarse_grain(&[rec(1, 1, 2)], 3).unwrap_err();
        assert!(matches!(err, Error::EmptyGraph));
    }

    #[test]
    fn duplicate_qualifying_pairs_collapse() {
        let g = coarse_grain(&[rec(1, 1, 3), rec(1, 1, 5), rec(1, 1, 4)], 3).unwrap();
        assert_eq!(g.links(), 1);
        assert_eq!(g.n(), 1);
    }

    #[test]
    fn entities_without_qualifying_records_get_no_index() {
        // user 2 only rates below threshold; object 9 likewise
        let recs = [rec(1, 1, 4), rec(2, 9, 1)];
        let (g, stats) = coarse_grain_with_stats(&recs, 3).unwrap();
        assert_eq!(g.n(), 1);
        assert_eq!(g.m(), 1);
        assert_eq!(stats.users_seen, 2);
        assert_eq!(stats.objects_seen, 2);
        assert_eq!(stats.users_linked, 1);
        assert_eq!(stats.objects_linked, 1);
        assert_eq!(stats.users_catalog, 2);
        assert_eq!(stats.objects_catalog, 9);
    }

    #[test]
    fn duplicating_records_leaves_graph_unchanged() {
        let recs = vec![rec(1, 1, 4), rec(1, 2, 3), rec(2, 2, 5), rec(2, 3, 2)];
        let doubled: Vec<_> = recs.iter().chain(recs.iter()).copied().collect();
        let a = coarse_grain(&recs, 3).unwrap();
        let b = coarse_grain(&doubled, 3).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn dense_indices_follow_external_order() {
        let g = coarse_grain(&[rec(30, 7, 5), rec(10, 9, 5)], 3).unwrap();
        assert_eq!(g.user_ids().externals(), &[10, 30]);
        assert_eq!(g.object_ids().externals(), &[7, 9]);
    }

    #[test]
    fn invalid_threshold_is_rejected() {
        assert!(matches!(
            coarse_grain(&[rec(1, 1, 5)], 0),
            Err(Error::InvalidThreshold(0))
        ));
        assert!(matches!(
            coarse_grain(&[rec(1, 1, 5)], 6),
            Err(Error::InvalidThreshold(6))
        ));
    }

    #[test]
    fn graph_cache_round_trips() {
        let recs = [rec(5, 100, 4), rec(5, 101, 3), rec(9, 100, 5)];
        let g = coarse_grain(&recs, 3).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("graph.txt");
        save_graph(&g, &path).unwrap();
        let loaded = load_graph(&path).unwrap();
        assert_eq!(g, loaded);
    }

    #[test]
    fn graph_cache_rejects_garbage() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.txt");
        std::fs::write(&path, "not a graph\n").unwrap();
        assert!(matches!(
            load_graph(&path),
            Err(Error::CacheFormat { .. })
        ));
    }
}
