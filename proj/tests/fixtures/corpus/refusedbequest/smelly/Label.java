package corpus.refusedbequest.smelly;

public class Label extends Shape {
    private String text;

    public String render() {
        return "[" + text + "]";
    }

    @Override
    public double perimeter() {
        throw new UnsupportedOperationException("labels have no perimeter");
    }
}

class Shape {
    protected int x;
    protected int y;

    public void moveTo(int nx, int ny) {
        x = nx;
        y = ny;
    }

    public int area() {
        return 0;
    }

    public String outline() {
        return "shape@" + x + "," + y;
    }

    public double perimeter() {
        return 0.0;
    }
}
