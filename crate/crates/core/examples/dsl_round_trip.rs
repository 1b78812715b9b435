//! Print generated systems and machines as text and read them back.

use snp_workbench::cm::unary_copier;
use snp_workbench::dsl::{parse_document, print_document, Document};
use snp_workbench::turing::{Dir, TuringMachine};
use snp_workbench::universal::{build_pi_input, build_pi_m};

fn main() {
    let tm = TuringMachine::new(2, 2, 2).unwrap().with(1, 1, 2, Dir::L, 2).with(1, 2, 1, Dir::R, 1);
    let docs = [
        Document::Tm(tm.clone()),
        Document::Snp(build_pi_m(&tm)),
        Document::Snp(build_pi_input(&tm)),
        Document::Cm(unary_copier()),
    ];
    for doc in &docs {
        let text = print_document(doc);
        let back = parse_document(&text).expect("printed text parses");
        assert_eq!(&back, doc);
        println!("{} lines round-trip; first: {}", text.lines().count(), text.lines().next().unwrap_or(""));
    }

    print!("\n{}", print_document(&docs[0]));

    let broken = "system s mode=standard input=none output=1 output_convention=gap\nneuron 1 spikes=1 {\n  rule \"s^2(s^\" / 1 -> 1 ; 1\n}\n";
    match parse_document(broken) {
        Err(e) => println!("\nrejected: {e}"),
        Ok(_) => unreachable!(),
    }
}
