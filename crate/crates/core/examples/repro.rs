use feyncat::category::{builtin_category, hom_enumerate, Obj};
use feyncat::decorate::DecoratedPresentation;
use feyncat::graph::{Aggregate, Corolla};
use feyncat::setops::SetOp;

fn main() {
    let c = builtin_category("C").unwrap();
    let d = DecoratedPresentation::new(c.clone(), SetOp::CycAss);
    let x_base = Aggregate::new(vec![
        Corolla::new("u", vec!["a".into(), "b".into(), "e".into()]).unwrap(),
        Corolla::new("w", vec!["e2".into(), "c".into(), "dd".into()]).unwrap(),
    ])
    .unwrap();
    let y_base = Aggregate::single(
        Corolla::new("t", (0..4).map(|i| format!("z{i}")).collect()).unwrap(),
    );
    let x = Obj {
        aggregate: x_base.clone(),
        marks: None,
        decoration: Some(vec!["0,1,2".into(), "0,1,2".into()]),
    };
    let base_count = hom_enumerate(&c, &Obj::plain(x_base), &Obj::plain(y_base.clone()))
        .unwrap()
        .len();
    println!("base tree morphisms: {base_count}");
    for dec in SetOp::CycAss.eval_object(&Obj::plain(y_base.clone())).unwrap() {
        let y = Obj {
            aggregate: y_base.clone(),
            marks: None,
            decoration: Some(dec.clone()),
        };
        let n = d.dec_hom(&x, &y).unwrap().len();
        println!("target dec {dec:?}: {n}");
    }
}
