// Gutter labels showing which window positions mirror each other:
// position i pairs with n-1-i, so a length-5 window reads A B C B' A'.

export function gutterLabels(nUnits: number): string[] {
  if (nUnits < 2) {
    throw new Error(`window length must be >= 2, got ${nUnits}`);
  }
  const k = Math.floor(nUnits / 2);
  const labels: string[] = [];
  for (let i = 0; i < nUnits; i++) {
    if (i < k) {
      labels.push(letter(i));
    } else if (i >= nUnits - k) {
      labels.push(letter(nUnits - 1 - i) + "′");
    } else {
      labels.push(letter(k)); // unpaired center of an odd window
    }
  }
  return labels;
}

function letter(index: number): string {
  // A..Z then AA, AB, ... for windows longer than 26 units
  let name = "";
  let i = index;
  do {
    name = String.fromCharCode(65 + (i % 26)) + name;
    i = Math.floor(i / 26) - 1;
  } while (i >= 0);
  return name;
}
