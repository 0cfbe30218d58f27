//! Browser demo: factor a pointed map, draw the forest of a chain of pointed
//! maps, and run the straightening roundtrip on a library operad.
//!
//! The exported functions take and return plain strings so the page needs
//! no bundler.

use std::fmt::Write as _;
use std::sync::Arc;

use opfib::dendroidal::{w_forest, Simplex};
use opfib::grothendieck::{roundtrip_algebra, roundtrip_fibration, unstraighten};
use opfib::operad::{enumerate_algebras, library};
use opfib::pointed::{MapKind, PointedMap};
use wasm_bindgen::prelude::*;

/// Parses `target: i1 i2 ..` (commas also accepted; `0` or `*` is the base
/// point).
fn parse_map(text: &str) -> Result<PointedMap, String> {
    let (target, image) = text.split_once(':').ok_or("expected `target: images`")?;
    let target: usize = target.trim().parse().map_err(|_| format!("bad target {target:?}"))?;
    let image = image
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|s| !s.is_empty())
        .map(|s| if s == "*" { Ok(0) } else { s.parse().map_err(|_| format!("bad image {s:?}")) })
        .collect::<Result<Vec<usize>, String>>()?;
    PointedMap::new(target, image).map_err(|e| e.to_string())
}

fn show(f: &PointedMap) -> String {
    let images: Vec<String> =
        f.image().iter().map(|&j| if j == 0 { "*".to_string() } else { j.to_string() }).collect();
    format!("{}_+ → {}_+ [{}]", f.source(), f.target(), images.join(" "))
}

pub fn factorize_text(input: &str) -> Result<String, String> {
    let f = parse_map(input)?;
    let (inert, active) = f.factorize();
    let kind = match f.classify() {
        MapKind::Active => "active",
        MapKind::Inert => "inert",
        MapKind::Neither => "neither active nor inert",
    };
    Ok(format!("map:    {}  ({kind})\ninert:  {}\nactive: {}", show(&f), show(&inert), show(&active)))
}

/// A chain of maps separated by `;`, or a bare size for a point.
fn parse_chain(input: &str) -> Result<Simplex, String> {
    if !input.contains(':') {
        let n: usize = input.trim().parse().map_err(|_| "expected maps or a single size".to_string())?;
        return Ok(Simplex::point(n));
    }
    let maps = input
        .split(';')
        .filter(|s| !s.trim().is_empty())
        .map(parse_map)
        .collect::<Result<Vec<_>, _>>()?;
    Simplex::from_maps(maps).map_err(|e| e.to_string())
}

/// SVG drawing of the forest of a chain: level `l` is a row, element `j` of
/// level `l` is an edge drawn from its slot on row `l` to its image on row
/// `l + 1`, and elements sent to the base point end in a root stub.
pub fn w_forest_svg_text(input: &str) -> Result<String, String> {
    let sigma = parse_chain(input)?;
    let objects = sigma.objects();
    let widest = objects.iter().copied().max().unwrap_or(0).max(1);
    let (dx, dy, pad) = (60.0, 70.0, 30.0);
    let width = pad * 2.0 + dx * widest as f64;
    let height = pad * 2.0 + dy * objects.len() as f64;
    let x = |j: usize| pad + dx * (j as f64 - 0.5);
    let y = |l: usize| height - pad - dy * l as f64;
    let mut svg = format!(
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" font-family="sans-serif" font-size="11">"#
    );
    for (l, &n) in objects.iter().enumerate() {
        for j in 1..=n {
            let (x0, y0) = (x(j), y(l));
            let (x1, y1) = match sigma.maps().get(l).map(|f| f.apply(j)) {
                Some(0) | None => (x0, y0 - dy * 0.45),
                Some(t) => (x(t), y(l + 1)),
            };
            let _ = write!(svg, r##"<line x1="{x0}" y1="{y0}" x2="{x1}" y2="{y1}" stroke="#335" stroke-width="2"/>"##);
            if l == 0 {
                let _ = write!(svg, r##"<text x="{x0}" y="{}" text-anchor="middle">{j}</text>"##, y0 + 14.0);
            }
        }
    }
    for l in 1..objects.len() {
        for j in 1..=objects[l] {
            let _ = write!(svg, r##"<circle cx="{}" cy="{}" r="5" fill="#c33"/>"##, x(j), y(l));
        }
    }
    let f = w_forest(&sigma);
    let _ = write!(
        svg,
        r##"<text x="{pad}" y="{}" fill="#555">{} trees, {} vertices: {}</text></svg>"##,
        pad * 0.6,
        f.roots().len(),
        f.vertex_count(),
        f.canonical()
    );
    Ok(svg)
}

/// Roundtrips every algebra with carriers of at most `size_bound` elements
/// over the named library operad.
pub fn roundtrip_text(operad: &str, size_bound: usize) -> Result<String, String> {
    let p = Arc::new(library::by_name(operad, 3).ok_or_else(|| format!("unknown operad {operad}"))?);
    let horizon = 2;
    let mut out = String::new();
    let algebras = enumerate_algebras(&p, size_bound.min(2));
    let _ = writeln!(out, "{operad}: {} algebras with carriers ≤ {}", algebras.len(), size_bound.min(2));
    for (i, alg) in algebras.iter().enumerate() {
        let unit = roundtrip_algebra(alg, horizon);
        let counit = unstraighten(alg, horizon)
            .map_err(|e| e.to_string())
            .and_then(|fib| roundtrip_fibration(&fib, horizon).map_err(|e| e.to_string()));
        let components: Vec<usize> =
            unit.as_ref().map(|s| s.witnesses.iter().map(|w| w.components).collect()).unwrap_or_default();
        let _ = writeln!(
            out,
            "#{i} carriers {:?}: St∘Un {}, Un∘St {}, comma components {:?}",
            alg.carriers(),
            if unit.is_ok() { "ok" } else { "FAILED" },
            if counit.is_ok() { "ok" } else { "FAILED" },
            components
        );
    }
    Ok(out)
}

#[wasm_bindgen]
pub fn factorize(input: &str) -> Result<String, JsValue> {
    factorize_text(input).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn w_forest_svg(input: &str) -> Result<String, JsValue> {
    w_forest_svg_text(input).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn straighten_roundtrip(operad: &str, size_bound: usize) -> Result<String, JsValue> {
    roundtrip_text(operad, size_bound).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn operad_names() -> String {
    library::all(3).into_iter().map(|(n, _)| n).collect::<Vec<_>>().join(",")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn factorization_text() {
        let out = factorize_text("3: 2 2 2 3 * *").unwrap();
        assert!(out.contains("inert:  6_+ → 4_+ [1 2 3 4 * *]"), "{out}");
        assert!(out.contains("active: 4_+ → 3_+ [2 2 2 3]"), "{out}");
        assert!(factorize_text("2: 3").is_err());
    }

    #[test]
    fn forest_drawing() {
        let svg = w_forest_svg_text("3: 1 1 3 3; 1: 1 1 0").unwrap();
        assert!(svg.starts_with("<svg") && svg.ends_with("</svg>"));
        assert!(svg.contains("2 trees, 4 vertices"), "{svg}");
        assert!(w_forest_svg_text("3").unwrap().contains("3 trees, 0 vertices"));
        assert!(w_forest_svg_text("2: 1; 1: 1").is_err());
    }

    #[test]
    fn roundtrip_report() {
        let out = roundtrip_text("comm", 2).unwrap();
        assert!(out.starts_with("comm: 5 algebras"));
        assert!(!out.contains("FAILED"));
        assert!(roundtrip_text("nope", 1).is_err());
    }
}
