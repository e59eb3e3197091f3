//! Published scores on the early Slavic test sets, used as comparison rows
//! by the `report` command.

use super::ScoreRow;

#[derive(Clone, Debug, PartialEq)]
pub struct PublishedTable {
    pub key: &'static str,
    pub title: &'static str,
    pub rows: Vec<ScoreRow>,
}

/// Best development scores with the selected grid sizes:
/// `(model, lstm size, mlp size, las, uas)`.
pub const CROSS_VALIDATION: [(&str, usize, usize, f64, f64); 3] = [
    ("jPTDP-SSL", 128, 300, 71.10, 78.95),
    ("jPTDP-ESL", 128, 300, 73.65, 79.95),
    ("jPTDP-GEN", 256, 200, 72.07, 79.39),
];

const TEST_SETS: [(&str, [(f64, f64); 3]); 9] = [
    ("ss", [(76.99, 69.51), (72.94, 62.61), (78.86, 71.87)]),
    ("cm", [(83.61, 77.98), (83.60, 77.83), (83.79, 78.42)]),
    ("cs", [(68.54, 58.76), (58.92, 42.88), (72.28, 63.38)]),
    ("vc", [(61.54, 51.28), (66.67, 48.72), (69.23, 56.41)]),
    ("es", [(62.83, 47.55), (81.02, 74.93), (80.86, 74.23)]),
    ("pc", [(68.08, 52.08), (85.70, 80.16), (85.22, 79.29)]),
    ("sr", [(58.63, 41.42), (71.59, 63.91), (73.24, 64.71)]),
    ("av", [(62.08, 45.25), (80.91, 74.96), (81.75, 75.80)]),
    ("on", [(58.82, 41.18), (74.33, 58.82), (72.19, 58.29)]),
];

pub fn published_scores() -> Vec<PublishedTable> {
    let models = ["jPTDP-SSL", "jPTDP-ESL", "jPTDP-GEN"];
    let test_sets = TEST_SETS
        .iter()
        .flat_map(|(set, scores)| models.iter().zip(scores).map(move |(m, &(u, l))| ScoreRow::new(*set, *m, u, l)))
        .collect();
    let marianus = [
        ("UD baseline model", 80.6, 73.4),
        ("jPTDP (previous)", 80.59, 73.93),
        ("jPTDP-GEN (default hyperparameters)", 83.32, 77.79),
        ("jPTDP-GEN (optimized)", 83.79, 78.42),
    ];
    let lav = [
        ("MaltParser", 84.5, 77.9),
        ("jPTDP-ESL (default hyperparameters)", 85.59, 79.25),
        ("jPTDP-ESL (optimized)", 85.7, 80.16),
    ];
    vec![
        PublishedTable { key: "test-sets", title: "Optimized models on the nine test sets", rows: test_sets },
        PublishedTable {
            key: "marianus",
            title: "OCS: marianus test set",
            rows: marianus.iter().map(|&(m, u, l)| ScoreRow::new("marianus", m, u, l)).collect(),
        },
        PublishedTable {
            key: "lav",
            title: "OES: lav test set",
            rows: lav.iter().map(|&(m, u, l)| ScoreRow::new("lav", m, u, l)).collect(),
        },
    ]
}
