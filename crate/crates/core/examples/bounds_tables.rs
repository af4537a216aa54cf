use cwlab::bounds::{emit_tables, fc_bounds};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let t = emit_tables(10, 62);
    print!("{}", t.to_text());
    println!("\n{}", t.weighings_csv()?);
    for n in [100, 1000, 10_000] {
        let (lo, hi) = fc_bounds(n);
        println!("N={n}: between {lo} and {hi} weighings");
    }
    Ok(())
}
