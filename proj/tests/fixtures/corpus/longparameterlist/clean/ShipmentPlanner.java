package corpus.longparameterlist.clean;

public class ShipmentPlanner {
    private int plannedCount;

    public String plan(Route route, int pallets) {
        int cost = route.cost() * pallets;
        plannedCount++;
        return route.label(cost);
    }
}

class Route {
    private Warehouse from;
    private Warehouse to;
    private Carrier carrier;
    private Schedule schedule;

    public int cost() {
        return carrier.rate(from.distanceTo(to));
    }

    public String label(int cost) {
        return schedule.slot(cost);
    }
}

class Warehouse {
    private int position;

    public int distanceTo(Warehouse other) {
        return Math.abs(position - other.position);
    }
}

class Carrier {
    private int baseRate;

    public int rate(int distance) {
        return baseRate + distance * 2;
    }
}

class Schedule {
    private String prefix;

    public String slot(int cost) {
        return prefix + "-" + cost;
    }
}
