//! Gnuplot scripts written next to the data files when `--gnuplot` is set.

pub fn gap_scan(csv: &str, title: &str) -> String {
    format!(
        "set datafile separator ','\nset key autotitle columnhead\nset xlabel 's'\nset title '{title}'\n\
         set multiplot layout 2,1\nplot '{csv}' using 1:2 with lines, '' using 1:3 with lines\n\
         set logscale y\nplot '{csv}' using 1:4 with lines\nunset multiplot\n"
    )
}

pub fn scaling(csv: &str, slope: f64, intercept: f64) -> String {
    format!(
        "set datafile separator ','\nset key autotitle columnhead\nset xlabel 'L'\nset ylabel 'ln(gap)'\n\
         plot '{csv}' using 1:3 with points, {slope}*x + {intercept} title 'fit'\n"
    )
}

pub fn evolve(csv: &str, with_errors: bool) -> String {
    let mut script = format!(
        "set datafile separator ','\nset key autotitle columnhead\nset xlabel 't'\nplot '{csv}' using 1:2 with lines\n"
    );
    if with_errors {
        script.push_str(&format!("pause -1\nplot '{csv}' using 1:5 with lines\n"));
    }
    script
}

pub fn ground_state(lattice: &str, continuum: &str) -> String {
    format!(
        "set datafile separator ','\nset key autotitle columnhead\nset multiplot layout 2,1\n\
         set xlabel 'm'\nplot '{lattice}' using 1:2 with linespoints\n\
         set xlabel 's'\nplot '{continuum}' using 1:2 with lines\nunset multiplot\n"
    )
}
