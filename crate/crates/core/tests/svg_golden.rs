use std::path::PathBuf;

use accept::analysis::plot_curve;
use accept::curve::SourceTag;
use accept::*;

fn paper_request() -> AnalysisRequest {
    let earnest = TrialSpec::new("EARNEST", ArmCount::new("NRTI", 426, 255), ArmCount::new("Rtvr", 433, 277))
        .with_unacceptable(0.0)
        .with_expected(10.0);
    let second = TrialSpec::new("SECOND-LINE", ArmCount::new("NRTI", 271, 219), ArmCount::new("Rtvr", 270, 223))
        .with_unacceptable(-12.0)
        .with_expected(0.0);
    AnalysisRequest::new(
        vec![TrialInput::from_counts(&earnest), TrialInput::from_counts(&second)],
        Mode::Freq,
    )
}

fn render(layout: Layout) -> String {
    let bundle = run_analyze(&paper_request()).unwrap();
    let curves = bundle
        .trials
        .iter()
        .map(|t| plot_curve(t.report(SourceTag::Freq).unwrap()))
        .collect();
    render_curve_svg(&PlotSpec::new(curves).with_layout(layout)).unwrap()
}

fn golden(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name)
}

fn check_golden(name: &str, svg: &str) {
    let path = golden(name);
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        std::fs::write(&path, svg).unwrap();
        return;
    }
    let want = std::fs::read_to_string(&path)
        .unwrap_or_else(|e| panic!("{}: {e}; rerun with UPDATE_GOLDEN=1", path.display()));
    assert!(want == svg, "{name} differs from the golden file; rerun with UPDATE_GOLDEN=1 to accept");
}

#[test]
fn faceted_matches_golden() {
    let svg = render(Layout::Faceted);
    assert_eq!(svg, render(Layout::Faceted));
    check_golden("paper_freq_faceted.svg", &svg);
}

#[test]
fn overlay_matches_golden() {
    check_golden("paper_freq_overlay.svg", &render(Layout::Overlay));
}

fn path_points(d: &str) -> Vec<(f64, f64)> {
    d.split_whitespace()
        .map(|tok| {
            let (x, y) = tok.trim_start_matches(['M', 'L']).split_once(',').unwrap();
            (x.parse().unwrap(), y.parse().unwrap())
        })
        .collect()
}

#[test]
fn well_formed_with_monotone_paths() {
    let bayes_req = AnalysisRequest { mode: Mode::Both, ..paper_request() };
    let bundle = run_analyze(&bayes_req).unwrap().with_figures().unwrap();
    let figures = bundle.svg.unwrap();
    for svg in [figures.bayes.unwrap(), figures.freq.unwrap(), render(Layout::Overlay)] {
        let doc = roxmltree::Document::parse(&svg).expect("well-formed XML");
        let root = doc.root_element();
        assert_eq!(root.tag_name().name(), "svg");
        assert_eq!(root.attribute("width"), Some("900.00"));

        let mut curves = 0;
        for node in doc.descendants().filter(|n| n.is_element()) {
            for attr in node.attributes() {
                if let Ok(v) = attr.value().parse::<f64>() {
                    assert!(v.is_finite(), "{}={}", attr.name(), attr.value());
                }
            }
            let class = node.attribute("class").unwrap_or("");
            if class.split(' ').any(|c| c == "curve") {
                curves += 1;
                let pts = path_points(node.attribute("d").unwrap());
                assert!(pts.len() > 10);
                for w in pts.windows(2) {
                    assert!(w[1].0 >= w[0].0, "x not monotone in {class}");
                    // SVG y grows downward, so a non-increasing curve has non-decreasing y.
                    assert!(w[1].1 >= w[0].1, "y not monotone in {class}");
                }
            }
        }
        assert_eq!(curves, 2);
        for text in ["Acceptability threshold", "Acceptability value", "EARNEST", "SECOND-LINE"] {
            assert!(svg.contains(text), "missing {text}");
        }
    }
}
