//! Minimal SVG line plots for the `--render` flag.

/// Renders one or more named traces as an SVG polyline chart.
pub fn line_chart(
    title: &str,
    x_label: &str,
    y_label: &str,
    traces: &[(&str, &[(f64, f64)])],
) -> String {
    const W: f64 = 720.0;
    const H: f64 = 480.0;
    const MARGIN: f64 = 60.0;
    const COLORS: [&str; 4] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];

    let points: Vec<(f64, f64)> = traces.iter().flat_map(|t| t.1.iter().copied()).collect();
    if points.is_empty() {
        return format!("<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{H}\"/>\n");
    }
    let (mut x0, mut x1, mut y0, mut y1) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
    for &(x, y) in &points {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    if x1 == x0 {
        x1 = x0 + 1.0;
    }
    if y1 == y0 {
        y1 = y0 + 1.0;
    }
    let sx = |x: f64| MARGIN + (x - x0) / (x1 - x0) * (W - 2.0 * MARGIN);
    let sy = |y: f64| H - MARGIN - (y - y0) / (y1 - y0) * (H - 2.0 * MARGIN);

    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{H}\" viewBox=\"0 0 {W} {H}\">\n"
    ));
    svg.push_str(&format!(
        "<rect width=\"{W}\" height=\"{H}\" fill=\"white\"/>\n\
         <text x=\"{}\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"16\">{title}</text>\n",
        W / 2.0
    ));
    svg.push_str(&format!(
        "<line x1=\"{m}\" y1=\"{b}\" x2=\"{r}\" y2=\"{b}\" stroke=\"black\"/>\n\
         <line x1=\"{m}\" y1=\"{t}\" x2=\"{m}\" y2=\"{b}\" stroke=\"black\"/>\n",
        m = MARGIN,
        r = W - MARGIN,
        t = MARGIN,
        b = H - MARGIN
    ));
    svg.push_str(&format!(
        "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">{x_label}</text>\n",
        W / 2.0,
        H - 16.0
    ));
    svg.push_str(&format!(
        "<text x=\"16\" y=\"{}\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" transform=\"rotate(-90 16 {})\">{y_label}</text>\n",
        H / 2.0,
        H / 2.0
    ));
    for (idx, (name, data)) in traces.iter().enumerate() {
        if data.is_empty() {
            continue;
        }
        let color = COLORS[idx % COLORS.len()];
        let path: Vec<String> =
            data.iter().map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y))).collect();
        svg.push_str(&format!(
            "<polyline points=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\"/>\n",
            path.join(" ")
        ));
        svg.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"12\" fill=\"{color}\">{name}</text>\n",
            W - MARGIN - 140.0,
            MARGIN + 18.0 * (idx as f64 + 1.0)
        ));
    }
    // axis extremes
    svg.push_str(&format!(
        "<text x=\"{m}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"10\">{x0:.4e}</text>\n\
         <text x=\"{}\" y=\"{}\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"10\">{x1:.4e}</text>\n\
         <text x=\"{}\" y=\"{}\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"10\">{y1:.4e}</text>\n",
        H - MARGIN + 14.0,
        W - MARGIN,
        H - MARGIN + 14.0,
        MARGIN - 4.0,
        MARGIN + 4.0,
        m = MARGIN,
    ));
    svg.push_str("</svg>\n");
    svg
}
