//! The worked-example complexes against their plain-text cell tables, and
//! the fat-sphere partition against its frozen audit samples.

use fatcw::cw::{self, fixtures, ComplexPoint, ComplexSpec};
use fatcw::geometry::HandlePoint;
use fatcw::kernels::KernelContext;
use std::collections::HashMap;
use std::sync::Arc;

type Table = (Vec<String>, Vec<(usize, String, usize)>);

fn parse_tables(text: &str) -> HashMap<String, Table> {
    let mut out = HashMap::new();
    let mut current: Option<String> = None;
    for raw in text.lines() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some(name) = line.strip_prefix('[').and_then(|s| s.strip_suffix(']')) {
            current = Some(name.to_string());
            out.insert(name.to_string(), (Vec::new(), Vec::new()));
            continue;
        }
        let section = current.as_ref().expect("entry before section header");
        let entry = out.get_mut(section).unwrap();
        let (key, value) = line.split_once('=').expect("key = value");
        match key.trim() {
            "base" => {
                entry.0 = value.split(',').map(|s| s.trim().to_string()).collect();
            }
            "cell" => {
                let parts: Vec<&str> = value.split(',').map(str::trim).collect();
                entry.1.push((
                    parts[0].parse().unwrap(),
                    parts[1].to_string(),
                    parts[2].parse().unwrap(),
                ));
            }
            other => panic!("unknown key {other}"),
        }
    }
    out
}

fn check_against_table(spec: &ComplexSpec, table: &Table) {
    let base_ids: Vec<String> = spec
        .base()
        .map(|b| b.ids.clone())
        .unwrap_or_default();
    assert_eq!(base_ids, table.0);
    let cells: Vec<(usize, String, usize)> = spec
        .cells()
        .iter()
        .map(|c| (c.level, c.id.clone(), c.m))
        .collect();
    assert_eq!(cells, table.1);
}

#[test]
fn fixtures_match_their_tables() {
    let tables = parse_tables(include_str!("../fixtures/complex_tables.txt"));
    check_against_table(&fixtures::iota(), &tables["iota"]);
    check_against_table(&fixtures::tdn(2), &tables["tdn2"]);
    check_against_table(&fixtures::tdn(3), &tables["tdn3"]);
    check_against_table(&fixtures::fat_s2(), &tables["fat-s2"]);
    check_against_table(&fixtures::double_flange_chain(), &tables["double-flange-chain"]);
}

#[test]
fn fat_s2_partition_matches_frozen_samples() {
    let ctx = Arc::new(KernelContext::new().unwrap());
    let spec = fixtures::fat_s2();
    let cover = fixtures::fat_s2_cover(&ctx);
    let pou = cw::build_partition(&ctx, &spec, cover, 0.25).unwrap();
    let text = include_str!("../fixtures/fat_s2_partition_golden.txt");
    let mut rows = 0;
    for raw in text.lines() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (_name, rest) = line.split_once('=').unwrap();
        let (coords, expect) = rest.split_once(';').unwrap();
        let nums: Vec<f64> = coords
            .split(',')
            .map(|s| s.trim().parse().unwrap())
            .collect();
        let expect: Vec<f64> = expect
            .split(',')
            .map(|s| s.trim().parse().unwrap())
            .collect();
        let level = nums[0] as usize;
        let cell = nums[1] as usize;
        let point = if level == 0 {
            HandlePoint::new(vec![], nums[2..].to_vec())
        } else {
            HandlePoint::new(nums[2..].to_vec(), vec![])
        };
        let got = pou
            .eval_all(&ComplexPoint::Cell { level, cell, point })
            .unwrap();
        for (g, e) in got.iter().zip(&expect) {
            assert!((g - e).abs() <= 1e-9, "{line}: got {got:?}");
        }
        rows += 1;
    }
    assert_eq!(rows, 8);
}
