//! Basis functions as integer matrices: construction against a transform
//! table, validation, decoding to infix text, and the serialization
//! round trip.
//!
//! Run with `cargo run --example encode_decode`.

use gsr::encoding::{
    decode_phi, decode_psi, parse_phi, parse_psi, phi_to_string, psi_to_string, random_phi,
    random_psi, validate_phi, validate_psi, write_phi, write_psi, MappingTable, PhiMatrix,
    PsiMatrix, Transform, DONT_CARE,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() {
    // Codes 0 and 1 are pinned to One and Identity; the rest are this
    // table's choice. Three input variables.
    let table = MappingTable::new(
        vec![
            Transform::One,
            Transform::Identity,
            Transform::Sin,
            Transform::Cos,
            Transform::Exp,
            Transform::Ln,
        ],
        3,
    )
    .unwrap();

    // One basis per matrix; rows multiply. Column 1 is the transform code,
    // column 2 the argument type (0 single, 1 sum, 2 product), columns 3..
    // the variables. A single-argument row reads only its first variable
    // cell, so the rest can be don't-care.
    let rows = vec![
        PhiMatrix::from_rows(vec![vec![2, 0, 1, DONT_CARE], vec![3, 0, 2, DONT_CARE]]),
        PhiMatrix::from_rows(vec![vec![5, 1, 1, 3]]), // 0 in a sum is "skip"
        PhiMatrix::from_rows(vec![vec![4, 2, 1, 2]]),
        PhiMatrix::from_rows(vec![vec![0, 0, 1, DONT_CARE]]),
    ];
    println!("hand-built feature bases:");
    for phi in &rows {
        validate_phi(&phi, &table).unwrap();
        println!("  {:?}  ->  {}", phi.rows(), phi_to_string(&decode_phi(&phi, &table)));
    }

    // Target-side bases are a single column of codes; rows multiply too.
    let psi = PsiMatrix::from_rows(vec![5]);
    validate_psi(&psi, &table).unwrap();
    println!("target basis {:?}  ->  {}", psi.rows(), psi_to_string(&decode_psi(&psi, &table)));

    // The text form carries the codes verbatim and parses back exactly.
    let phi = &rows[0];
    let text = write_phi(phi, &table);
    println!("\nserialized:\n{text}");
    let (back, d) = parse_phi(&text).unwrap();
    assert_eq!(back.rows(), phi.rows());
    assert_eq!(d, table.d());
    let psi_text = write_psi(&psi);
    let psi_back = parse_psi(&psi_text).unwrap();
    assert_eq!(psi_back.rows(), psi.rows());
    println!("round trip ok");

    // Random matrices drawn from a code subset are valid by construction.
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    println!("\nrandom draws from the full library:");
    for _ in 0..4 {
        let phi = random_phi(&table, &table.full_codes(), &mut rng);
        validate_phi(&phi, &table).unwrap();
        let psi = random_psi(&table, &table.full_codes(), true, &mut rng);
        validate_psi(&psi, &table).unwrap();
        println!(
            "  {}    target {}",
            phi_to_string(&decode_phi(&phi, &table)),
            psi_to_string(&decode_psi(&psi, &table))
        );
    }
}
