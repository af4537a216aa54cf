//! Reads a tree in line format, expands `sym`, and writes the JSON form.

use cwlab::codec::{max_coin_in, parse_interchange, serialize_interchange, serialize_text_with, TextOptions};
use cwlab::fixtures::INLINE_2_3;
use cwlab::{parse, serialize_text, verify, Mode};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let n = max_coin_in(INLINE_2_3.text)?;
    let tree = parse(INLINE_2_3.text, n)?;
    println!("canonical:\n{}", serialize_text(&tree));

    let expanded = serialize_text_with(&tree, TextOptions { compress_sym: false, unicode_arrow: true });
    println!("expanded:\n{expanded}");

    let doc = serialize_interchange(&tree);
    println!("{}", serde_json::to_string_pretty(&doc)?);
    let back = parse_interchange(&doc)?;
    assert_eq!(back, tree);
    println!("round trip valid: {}", verify(&back, Mode::Fc)?.valid);

    // errors carry a position
    if let Err(e) = parse("0. 1 v 1 : (1), (2), (1, 2).", 2) {
        println!("bad input: {e}");
    }
    Ok(())
}
