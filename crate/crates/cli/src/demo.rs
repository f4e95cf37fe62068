//! The four-point example: a ternary relation on `x1..x4` over a base of
//! three thirds `t1 t2 t3`, computed three independent ways.

use anyhow::{Context, Result};

use convalg_core::complex::rel_image;
use convalg_core::convolution::conv_op;
use convalg_core::etale::{phi, phi_inverse};
use convalg_core::text::{parse_lattice_map, parse_structure, parse_topology};
use convalg_core::{CarrierSubset, ConstantRelationalEtale, HeytingLattice, LatticeMap};

use crate::report::Report;

const STRUCTURE: &str = include_str!("../../../data/ternary.structure");
const TOPOLOGY: &str = include_str!("../../../data/thirds.topology");
const ALPHA1: &str = include_str!("../../../data/alpha1.map");
const ALPHA2: &str = include_str!("../../../data/alpha2.map");
const EXPECTED: &str = "x1 -> {t2}\nx2 -> {}\nx3 -> {}\nx4 -> {t1 t3}\n";

pub fn run() -> Result<Report> {
    let s = parse_structure(STRUCTURE).context("built-in structure")?;
    let t = parse_topology(TOPOLOGY).context("built-in topology")?;
    let l = HeytingLattice::open_sets(&t);
    let a1 = parse_lattice_map(&l, &s, ALPHA1).context("built-in map")?;
    let a2 = parse_lattice_map(&l, &s, ALPHA2).context("built-in map")?;
    let r = s.symbol("R")?;

    let via_conv = conv_op(&l, &s, r, &[&a1, &a2])?;

    // one relational image per base point, reassembled into a map
    let mut sections = vec![0u64; s.carrier_len()];
    for y in 0..t.points().len() {
        let fiber = |a: &LatticeMap| {
            let members = (0..s.carrier_len())
                .filter(|&x| l.open_set(a.get(x)).is_some_and(|m| m >> y & 1 == 1));
            CarrierSubset::new(s.carrier_len(), members)
        };
        let image = rel_image(&s, r, &[&fiber(&a1)?, &fiber(&a2)?])?;
        for &x in image.members() {
            sections[x] |= 1 << y;
        }
    }
    let via_fibers = LatticeMap::new(
        sections
            .iter()
            .map(|&m| l.elem_of_open(m).context("fiberwise image is not open"))
            .collect::<Result<_>>()?,
    );

    let e = ConstantRelationalEtale::new(&s, t.clone());
    let image = e.fiberwise_rel_image(r, &[&phi(&l, &a1)?, &phi(&l, &a2)?])?;
    let via_etale = phi_inverse(&l, &image)?;

    let mut out = Report::new();
    for (route, map) in [
        ("convolution", &via_conv),
        ("complex per fiber", &via_fibers),
        ("etale", &via_etale),
    ] {
        out.field("route", route);
        out.map_lines(&map.display(&l, s.carrier()).to_string());
    }
    let rendered = via_conv.display(&l, s.carrier()).to_string();
    if via_conv != via_fibers || via_conv != via_etale {
        out.fail("the three routes disagree");
    } else if rendered != EXPECTED {
        out.fail(format!("unexpected result:\n{rendered}"));
    }
    Ok(out.finish())
}
