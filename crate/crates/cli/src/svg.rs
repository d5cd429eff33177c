//! Minimal SVG emission; enough for a quick look at a contour without
//! pulling in a plotting stack.

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 640.0;
const PALETTE: [&str; 4] = ["#1f77b4", "#d62728", "#2ca02c", "#7f7f7f"];

/// Renders each named series as a polyline in a shared frame. Coordinates
/// are mapped so the joint bounding box fills the canvas with a 5% margin,
/// y increasing upward.
pub fn polyline_svg(series: &[(&str, Vec<(f64, f64)>)]) -> String {
    let points = series.iter().flat_map(|(_, pts)| pts.iter());
    let mut min = (f64::INFINITY, f64::INFINITY);
    let mut max = (f64::NEG_INFINITY, f64::NEG_INFINITY);
    for &(x, y) in points {
        min.0 = min.0.min(x);
        min.1 = min.1.min(y);
        max.0 = max.0.max(x);
        max.1 = max.1.max(y);
    }
    if !(min.0.is_finite() && min.1.is_finite()) {
        min = (0.0, 0.0);
        max = (1.0, 1.0);
    }
    let span = ((max.0 - min.0).max(1e-9), (max.1 - min.1).max(1e-9));
    let scale = ((WIDTH * 0.9) / span.0).min((HEIGHT * 0.9) / span.1);
    let offset = (
        (WIDTH - span.0 * scale) / 2.0,
        (HEIGHT - span.1 * scale) / 2.0,
    );

    let mut out = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 {WIDTH} {HEIGHT}\">\n"
    );
    for (k, (name, pts)) in series.iter().enumerate() {
        let coords: Vec<String> = pts
            .iter()
            .map(|&(x, y)| {
                let px = offset.0 + (x - min.0) * scale;
                let py = HEIGHT - offset.1 - (y - min.1) * scale;
                format!("{px:.2},{py:.2}")
            })
            .collect();
        out.push_str(&format!(
            "  <polyline fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\" \
             data-series=\"{}\" points=\"{}\"/>\n",
            PALETTE[k % PALETTE.len()],
            name,
            coords.join(" ")
        ));
    }
    out.push_str("</svg>\n");
    out
}
